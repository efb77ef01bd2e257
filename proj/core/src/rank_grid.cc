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

#include "hcp/rank_grid.h"

#include <string>

namespace hcp {

RankGrid::RankGrid(const ParallelConfig& par, int64_t gpus_per_node)
    : hp_(par.hp),
      cp_(par.cp),
      inner_ring_(par.inner_ring),
      gpus_per_node_(gpus_per_node),
      placement_(par.placement) {
  if (hp_ < 1 || cp_ < 1) throw ConfigError("d_hp and d_cp must be >= 1");
  if (inner_ring_ < 1 || cp_ % inner_ring_ != 0) {
    throw ConfigError("w divides d_cp violated (w=" +
                      std::to_string(inner_ring_) +
                      ", d_cp=" + std::to_string(cp_) + ")");
  }
  if (gpus_per_node_ < 1) throw ConfigError("gpus_per_node must be >= 1");
  coords_.resize(static_cast<size_t>(hp_ * cp_));
  for (int64_t i = 0; i < hp_; ++i) {
    for (int64_t j = 0; j < cp_; ++j) coords_[rank(i, j)] = {i, j};
  }
}

int64_t RankGrid::rank(int64_t hp_index, int64_t cp_index) const {
  if (placement_ == Placement::kHeadFirst) return cp_index * hp_ + hp_index;
  return hp_index * cp_ + cp_index;
}

std::vector<int64_t> RankGrid::cp_group(int64_t hp_index) const {
  std::vector<int64_t> out;
  out.reserve(cp_);
  for (int64_t j = 0; j < cp_; ++j) out.push_back(rank(hp_index, j));
  return out;
}

std::vector<int64_t> RankGrid::hp_group(int64_t cp_index) const {
  std::vector<int64_t> out;
  out.reserve(hp_);
  for (int64_t i = 0; i < hp_; ++i) out.push_back(rank(i, cp_index));
  return out;
}

RankGrid BuildRankGrid(const ParallelConfig& par, const ClusterConfig& cluster) {
  return RankGrid(par, cluster.gpus_per_node);
}

}  // namespace hcp
