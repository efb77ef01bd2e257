/* Copyright 2026 The HCP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hcp/trace.h"

#include <fstream>
#include <stdexcept>

namespace hcp {

namespace {

const char* Category(TaskKind k) {
  switch (k) {
    case TaskKind::kCompute: return "compute";
    case TaskKind::kSendInner: return "p2p_inner";
    case TaskKind::kSendOuter: return "p2p_outer";
    case TaskKind::kAlltoall: return "alltoall";
  }
  return "unknown";
}

}  // namespace

std::vector<TraceEvent> TraceEvents(const SimResult& result, const RankGrid& grid) {
  std::vector<TraceEvent> out;
  for (const SimTask& t : result.tasks) {
    for (int64_t r : t.ranks) {
      out.push_back({t.name, Category(t.kind), grid.node_of(r), r, t.start,
                     t.end - t.start});
    }
  }
  return out;
}

nlohmann::json ChromeTrace(const std::vector<TraceEvent>& events) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TraceEvent& e : events) {
    arr.push_back({{"name", e.name},
                   {"cat", e.category},
                   {"ph", "X"},
                   {"pid", e.pid},
                   {"tid", e.tid},
                   {"ts", e.start * 1e6},
                   {"dur", e.duration * 1e6}});
  }
  return arr;
}

std::vector<TraceEvent> ParseChromeTrace(const nlohmann::json& trace) {
  if (!trace.is_array()) throw std::invalid_argument("trace must be a JSON array");
  std::vector<TraceEvent> out;
  for (const auto& e : trace) {
    if (e.at("ph").get<std::string>() != "X") continue;
    out.push_back({e.at("name").get<std::string>(), e.value("cat", ""),
                   e.at("pid").get<int64_t>(), e.at("tid").get<int64_t>(),
                   e.at("ts").get<double>() * 1e-6,
                   e.at("dur").get<double>() * 1e-6});
  }
  return out;
}

void WriteJsonFile(const std::string& path, const nlohmann::json& value) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << value.dump(2) << '\n';
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace hcp
