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

#ifndef HCP_RING_H_
#define HCP_RING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hcp/attention.h"
#include "hcp/config.h"
#include "hcp/rank_grid.h"
#include "hcp/sharding.h"

namespace hcp {

struct MicroStep {
  int64_t outer = 0;   // outer ring step in [0, d_cp / w)
  int64_t inner = 0;   // inner ring step in [0, w)
  int64_t source = 0;  // cp index whose KV chunk is consumed

  bool operator==(const MicroStep&) const = default;
};

// Per-CP-rank order in which KV chunks are consumed by the double ring.
// The cp index j sits in inner ring r = j / w at slot p = j % w. At outer
// step o, inner step t, it consumes the chunk that originated at ring
// (r - o) mod (d_cp / w), slot (p - t) mod w.
struct RingSchedule {
  int64_t cp = 1;
  int64_t inner_ring = 1;
  std::vector<std::vector<MicroStep>> steps;  // [cp index][o * w + t]

  int64_t outer_ring() const { return cp / inner_ring; }
};

RingSchedule BuildRingSchedule(int64_t cp, int64_t inner_ring);

// Runs double-ring attention over one CP group. q/k/v are the HeadSharded
// chunks of the group ordered by cp index. KV chunks travel between ranks
// exactly as the two rings pass them; each rank folds its partial results
// with BlockUpdate in schedule order. If `consumed` is given it receives,
// per cp index, the origin of every chunk in consumption order.
template <typename T>
std::vector<BlockResult<T>> RunDoubleRing(
    std::span<const Tensor<T>> q, std::span<const Tensor<T>> k,
    std::span<const Tensor<T>> v, const RingSchedule& schedule, bool causal,
    std::vector<std::vector<int64_t>>* consumed = nullptr);

struct TwoDOptions {
  bool causal = true;
  // Negates one rank's HeadSharded output before the gather. Fault
  // injection for the verification harness.
  std::optional<int64_t> flip_sign_rank;
};

// Where data went during a 2D run; used to compare routing between
// configurations without looking at values.
struct TwoDRouting {
  std::vector<std::vector<int64_t>> seq_positions;   // SeqSharded, by rank
  std::vector<std::vector<int64_t>> head_positions;  // HeadSharded, by rank
  std::vector<int64_t> q_head_offsets;               // HeadSharded, by rank
  std::vector<int64_t> kv_head_offsets;
  int64_t replicated_kv_heads = 0;
  std::vector<std::vector<int64_t>> consumed;        // KV origins, by rank

  bool operator==(const TwoDRouting&) const = default;
};

// Replicate KV -> SeqAlltoAll -> per-CP-group double ring -> SeqAlltoAll,
// then undo the zigzag order. q is (H, S, d) and k, v are (H_kv, S, d), all
// in sequence order. Returns the global attention output.
template <typename T>
Tensor<T> Run2DAttention(const Tensor<T>& q, const Tensor<T>& k,
                         const Tensor<T>& v, const ParallelConfig& par,
                         const RankGrid& grid, const TwoDOptions& options = {},
                         TwoDRouting* routing = nullptr);

#define HCP_RING_EXTERN(T)                                                   \
  extern template std::vector<BlockResult<T>> RunDoubleRing(                \
      std::span<const Tensor<T>>, std::span<const Tensor<T>>,               \
      std::span<const Tensor<T>>, const RingSchedule&, bool,                \
      std::vector<std::vector<int64_t>>*);                                  \
  extern template Tensor<T> Run2DAttention(                                 \
      const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,                 \
      const ParallelConfig&, const RankGrid&, const TwoDOptions&, TwoDRouting*);
HCP_RING_EXTERN(float)
HCP_RING_EXTERN(double)
#undef HCP_RING_EXTERN

}  // namespace hcp

#endif  // HCP_RING_H_
