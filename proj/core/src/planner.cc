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

#include "hcp/planner.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hcp/rank_grid.h"
#include "hcp/timeline.h"

namespace hcp {

std::vector<ParallelConfig> EnumerateConfigs(const ModelConfig& model, int64_t sp,
                                             const ClusterConfig& cluster,
                                             int64_t dp) {
  if (sp < 1) throw ConfigError("d_sp must be >= 1");
  std::vector<ParallelConfig> out;
  std::set<std::tuple<int64_t, int64_t, int64_t, int>> seen;
  for (int64_t hp = 1; hp <= sp; ++hp) {
    if (sp % hp != 0 || hp > model.heads) continue;
    const int64_t cp = sp / hp;
    for (int64_t w = 1; w <= cp; ++w) {
      if (cp % w != 0) continue;
      for (Placement pl : {Placement::kHeadFirst, Placement::kContextFirst}) {
        // A single GPU has no placement to choose.
        if (sp == 1 && pl == Placement::kContextFirst) continue;
        ParallelConfig par{dp, hp, cp, w, pl};
        if (!Validate(model, par, cluster).ok()) continue;
        if (seen.emplace(hp, cp, w, static_cast<int>(pl)).second) out.push_back(par);
      }
    }
  }
  return out;
}

PlanEntry Score(const ModelConfig& model, const ParallelConfig& par,
                const ClusterConfig& cluster, const PlanOptions& options) {
  ValidateOrThrow(model, par, cluster);
  const RankGrid grid = BuildRankGrid(par, cluster);
  PlanEntry e;
  e.config = par;
  e.cost = Objective(model, par, cluster, grid);
  if (options.simulate || options.key == RankKey::kSimMakespan) {
    e.makespan = Simulate(model, par, cluster, grid).makespan;
  }
  e.memory = MemoryEstimate(model, par, options.checkpoint,
                            std::min(options.zero_shard_degree, par.dp * par.sp()));
  if (cluster.gpu_mem_bytes) e.fits_memory = e.memory.total_bytes <= *cluster.gpu_mem_bytes;
  e.within_heads = par.hp <= model.heads;
  return e;
}

std::vector<PlanEntry> Rank(std::vector<PlanEntry> entries, RankKey key) {
  if (entries.empty()) throw std::invalid_argument("cannot rank an empty plan");
  auto value = [key](const PlanEntry& e) {
    if (key == RankKey::kObjective) return e.cost.objective;
    if (!e.makespan) throw std::invalid_argument("entry has no simulated makespan");
    return *e.makespan;
  };
  for (const auto& e : entries) value(e);
  std::stable_sort(entries.begin(), entries.end(),
                   [&](const PlanEntry& a, const PlanEntry& b) {
                     return std::make_tuple(value(a), a.config.hp, a.config.inner_ring,
                                            static_cast<int>(a.config.placement),
                                            a.config.cp) <
                            std::make_tuple(value(b), b.config.hp, b.config.inner_ring,
                                            static_cast<int>(b.config.placement),
                                            b.config.cp);
                   });
  return entries;
}

std::vector<PlanEntry> Plan(const ModelConfig& model, int64_t sp,
                            const ClusterConfig& cluster,
                            const PlanOptions& options) {
  std::vector<PlanEntry> entries;
  for (const ParallelConfig& par : EnumerateConfigs(model, sp, cluster, options.dp)) {
    PlanEntry e = Score(model, par, cluster, options);
    if (e.fits_memory) entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw ConfigError("no valid configuration for d_sp=" + std::to_string(sp));
  }
  return Rank(std::move(entries), options.key);
}

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string PlanCsv(const std::vector<PlanEntry>& ranked) {
  std::ostringstream os;
  os << "d_hp,d_cp,w,placement,objective_ms,makespan_ms,mem_GB,rank\n";
  for (size_t r = 0; r < ranked.size(); ++r) {
    const PlanEntry& e = ranked[r];
    os << e.config.hp << ',' << e.config.cp << ',' << e.config.inner_ring << ','
       << PlacementName(e.config.placement) << ',' << Fixed(e.cost.objective * 1e3, 6)
       << ',' << (e.makespan ? Fixed(*e.makespan * 1e3, 6) : std::string()) << ','
       << Fixed(e.memory.total_bytes / 1e9, 6) << ',' << r + 1 << '\n';
  }
  return os.str();
}

nlohmann::json PlanJson(const std::vector<PlanEntry>& ranked) {
  nlohmann::json arr = nlohmann::json::array();
  for (size_t r = 0; r < ranked.size(); ++r) {
    const PlanEntry& e = ranked[r];
    arr.push_back({
        {"d_hp", e.config.hp},
        {"d_cp", e.config.cp},
        {"w", e.config.inner_ring},
        {"placement", PlacementName(e.config.placement)},
        {"objective_ms", e.cost.objective * 1e3},
        {"makespan_ms", e.makespan ? nlohmann::json(*e.makespan * 1e3) : nlohmann::json()},
        {"mem_GB", e.memory.total_bytes / 1e9},
        {"rank", r + 1},
        {"fits_memory", e.fits_memory},
        {"within_heads", e.within_heads},
        {"cost", ToJson(e.cost)},
        {"memory", ToJson(e.memory)},
    });
  }
  return arr;
}

}  // namespace hcp
