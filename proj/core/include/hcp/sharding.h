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

#ifndef HCP_SHARDING_H_
#define HCP_SHARDING_H_

#include <cstdint>
#include <vector>

#include "hcp/rank_grid.h"
#include "hcp/tensor.h"

namespace hcp {

// order[k] is the original position placed at reordered index k;
// inverse[pos] is the reordered index of original position pos.
struct Permutation {
  std::vector<int64_t> order;
  std::vector<int64_t> inverse;
};

// Load-balanced causal reorder: the sequence is cut into 2*cp equal stripes
// and CP rank j owns stripes j and 2*cp-1-j, in that order. The returned
// permutation concatenates the ranks' stripe sets by cp index.
Permutation ZigzagReorder(int64_t seq_len, int64_t cp);

// Original positions owned by one CP rank under ZigzagReorder.
std::vector<int64_t> ZigzagPositions(int64_t seq_len, int64_t cp,
                                     int64_t cp_index);

enum class Layout {
  kSeqSharded,   // (H, S/d_sp, d) per rank
  kHeadSharded,  // (H'/d_hp, S/d_cp, d) per rank
};

// Per-rank chunks of one logical (heads, S, head_dim) tensor.
template <typename T>
struct ShardedSeq {
  Layout layout = Layout::kSeqSharded;
  RankGrid grid;
  int64_t total_heads = 0;
  int64_t seq_len = 0;
  std::vector<Tensor<T>> chunks;       // indexed by rank
  std::vector<int64_t> head_offsets;   // first global head held by each rank
};

// Splits a global tensor (positions 0..S-1 in order) into the SeqSharded
// layout. HP group j jointly owns the zigzag stripe set of cp index j; rank
// (i, j) holds the i-th S/d_sp slice of it.
template <typename T>
ShardedSeq<T> ShardSequence(const Tensor<T>& global, const RankGrid& grid);

// Reassembles the global tensor from either layout, ordering tokens by
// their original positions.
template <typename T>
Tensor<T> Unshard(const ShardedSeq<T>& seq);

// Repeats each KV head contiguously so that the head count becomes
// ReplicatedKvHeads(heads, total_heads, grid.hp()). No-op if already
// divisible by d_hp.
template <typename T>
ShardedSeq<T> KvReplicate(const ShardedSeq<T>& kv, int64_t heads);

// SeqSharded -> HeadSharded inside each HP group: rank (i, j) receives head
// block i of every rank in HP group j, concatenated in hp order.
template <typename T>
ShardedSeq<T> SeqAlltoAllScatter(const ShardedSeq<T>& seq);

// HeadSharded -> SeqSharded; exact inverse of SeqAlltoAllScatter.
template <typename T>
ShardedSeq<T> SeqAlltoAllGather(const ShardedSeq<T>& seq);

#define HCP_SHARDING_EXTERN(T)                                               \
  extern template ShardedSeq<T> ShardSequence(const Tensor<T>&,             \
                                              const RankGrid&);             \
  extern template Tensor<T> Unshard(const ShardedSeq<T>&);                  \
  extern template ShardedSeq<T> KvReplicate(const ShardedSeq<T>&, int64_t); \
  extern template ShardedSeq<T> SeqAlltoAllScatter(const ShardedSeq<T>&);   \
  extern template ShardedSeq<T> SeqAlltoAllGather(const ShardedSeq<T>&);
HCP_SHARDING_EXTERN(float)
HCP_SHARDING_EXTERN(double)
#undef HCP_SHARDING_EXTERN

}  // namespace hcp

#endif  // HCP_SHARDING_H_
