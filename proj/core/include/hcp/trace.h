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

#ifndef HCP_TRACE_H_
#define HCP_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcp/rank_grid.h"
#include "hcp/timeline.h"

namespace hcp {

// One complete ("X") event of the Chrome trace format. Times in seconds.
struct TraceEvent {
  std::string name;
  std::string category;
  int64_t pid = 0;  // node
  int64_t tid = 0;  // rank
  double start = 0;
  double duration = 0;

  bool operator==(const TraceEvent&) const = default;
};

std::vector<TraceEvent> TraceEvents(const SimResult& result, const RankGrid& grid);

// JSON array of "X" events, timestamps in microseconds.
nlohmann::json ChromeTrace(const std::vector<TraceEvent>& events);
std::vector<TraceEvent> ParseChromeTrace(const nlohmann::json& trace);

void WriteJsonFile(const std::string& path, const nlohmann::json& value);

}  // namespace hcp

#endif  // HCP_TRACE_H_
