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

#ifndef HCP_RANK_GRID_H_
#define HCP_RANK_GRID_H_

#include <cstdint>
#include <vector>

#include "hcp/config.h"

namespace hcp {

// Logical coordinates of a sequence-parallel rank: hp index i selects the
// head block, cp index j the position inside its context-parallel group.
struct GridCoord {
  int64_t hp = 0;
  int64_t cp = 0;

  bool operator==(const GridCoord&) const = default;
};

// Mapping between the d_sp ranks and the d_hp x d_cp logical grid, plus
// the physical node of each rank.
//
// HeadFirst numbers ranks hp-major (rank = j * d_hp + i) so HP groups are
// node-contiguous; ContextFirst numbers them cp-major (rank = i * d_cp + j)
// so CP groups are node-contiguous. Nodes are filled in rank order.
class RankGrid {
 public:
  RankGrid(const ParallelConfig& par, int64_t gpus_per_node);

  int64_t size() const { return static_cast<int64_t>(coords_.size()); }
  int64_t hp() const { return hp_; }
  int64_t cp() const { return cp_; }
  int64_t inner_ring() const { return inner_ring_; }
  int64_t outer_ring() const { return cp_ / inner_ring_; }
  int64_t gpus_per_node() const { return gpus_per_node_; }
  Placement placement() const { return placement_; }

  GridCoord coord(int64_t rank) const { return coords_.at(rank); }
  int64_t rank(int64_t hp_index, int64_t cp_index) const;
  int64_t node_of(int64_t rank) const { return rank / gpus_per_node_; }
  int64_t local_index(int64_t rank) const { return rank % gpus_per_node_; }
  bool same_node(int64_t a, int64_t b) const { return node_of(a) == node_of(b); }

  // Ranks of CP group i (ordered by cp index) and HP group j (by hp index).
  std::vector<int64_t> cp_group(int64_t hp_index) const;
  std::vector<int64_t> hp_group(int64_t cp_index) const;

  // Double-ring coordinates of cp index j: inner ring j / w, slot j % w.
  int64_t ring_of(int64_t cp_index) const { return cp_index / inner_ring_; }
  int64_t slot_of(int64_t cp_index) const { return cp_index % inner_ring_; }
  int64_t cp_index_of(int64_t ring, int64_t slot) const {
    return ring * inner_ring_ + slot;
  }

  bool operator==(const RankGrid&) const = default;

 private:
  int64_t hp_;
  int64_t cp_;
  int64_t inner_ring_;
  int64_t gpus_per_node_;
  Placement placement_;
  std::vector<GridCoord> coords_;
};

RankGrid BuildRankGrid(const ParallelConfig& par, const ClusterConfig& cluster);

}  // namespace hcp

#endif  // HCP_RANK_GRID_H_
