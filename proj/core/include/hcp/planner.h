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

#ifndef HCP_PLANNER_H_
#define HCP_PLANNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcp/config.h"
#include "hcp/cost_model.h"

namespace hcp {

enum class RankKey { kObjective, kSimMakespan };

struct PlanOptions {
  RankKey key = RankKey::kObjective;
  CheckpointMode checkpoint = CheckpointMode::kSelectivePlusPlus;
  int64_t dp = 1;
  int64_t zero_shard_degree = 1;
  // Run the timeline simulator for every entry even when ranking by
  // objective (always done for kSimMakespan).
  bool simulate = false;
};

struct PlanEntry {
  ParallelConfig config;
  CostReport cost;
  std::optional<double> makespan;
  MemoryReport memory;
  bool fits_memory = true;   // false only when a capacity is configured
  bool within_heads = true;  // d_hp <= H
};

// Every (d_hp, d_cp, w, placement) with d_hp * d_cp = d_sp, d_hp <= H and
// w | d_cp that passes Validate, in (d_hp, w, placement) order. Both
// placements are listed even where they yield the same physical layout,
// except for d_sp = 1 which yields a single HeadFirst entry.
std::vector<ParallelConfig> EnumerateConfigs(const ModelConfig& model, int64_t sp,
                                             const ClusterConfig& cluster,
                                             int64_t dp = 1);

PlanEntry Score(const ModelConfig& model, const ParallelConfig& par,
                const ClusterConfig& cluster, const PlanOptions& options);

// Ascending by key; ties go to smaller d_hp, then smaller w, then
// HeadFirst. Throws std::invalid_argument on empty input or when ranking by
// makespan and an entry has none.
std::vector<PlanEntry> Rank(std::vector<PlanEntry> entries, RankKey key);

// Enumerate, score, drop entries over the memory capacity (if one is set)
// and rank.
std::vector<PlanEntry> Plan(const ModelConfig& model, int64_t sp,
                            const ClusterConfig& cluster,
                            const PlanOptions& options);

// Columns: d_hp, d_cp, w, placement, objective_ms, makespan_ms, mem_GB, rank.
std::string PlanCsv(const std::vector<PlanEntry>& ranked);
nlohmann::json PlanJson(const std::vector<PlanEntry>& ranked);

}  // namespace hcp

#endif  // HCP_PLANNER_H_
