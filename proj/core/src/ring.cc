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

#include "hcp/ring.h"

#include <string>
#include <utility>

namespace hcp {

RingSchedule BuildRingSchedule(int64_t cp, int64_t inner_ring) {
  if (cp < 1 || inner_ring < 1 || cp % inner_ring != 0) {
    throw ConfigError("ring schedule requires w divides d_cp (w=" +
                      std::to_string(inner_ring) + ", d_cp=" + std::to_string(cp) +
                      ")");
  }
  RingSchedule s{cp, inner_ring, {}};
  const int64_t rings = cp / inner_ring;
  s.steps.resize(cp);
  for (int64_t j = 0; j < cp; ++j) {
    const int64_t ring = j / inner_ring;
    const int64_t slot = j % inner_ring;
    for (int64_t o = 0; o < rings; ++o) {
      const int64_t src_ring = ((ring - o) % rings + rings) % rings;
      for (int64_t t = 0; t < inner_ring; ++t) {
        const int64_t src_slot = ((slot - t) % inner_ring + inner_ring) % inner_ring;
        s.steps[j].push_back({o, t, src_ring * inner_ring + src_slot});
      }
    }
  }
  return s;
}

namespace {

template <typename T>
struct KvChunk {
  const Tensor<T>* k = nullptr;
  const Tensor<T>* v = nullptr;
  int64_t origin = -1;
};

}  // namespace

template <typename T>
std::vector<BlockResult<T>> RunDoubleRing(
    std::span<const Tensor<T>> q, std::span<const Tensor<T>> k,
    std::span<const Tensor<T>> v, const RingSchedule& schedule, bool causal,
    std::vector<std::vector<int64_t>>* consumed) {
  const int64_t cp = schedule.cp;
  const int64_t w = schedule.inner_ring;
  const int64_t rings = schedule.outer_ring();
  if (static_cast<int64_t>(q.size()) != cp || static_cast<int64_t>(k.size()) != cp ||
      static_cast<int64_t>(v.size()) != cp ||
      static_cast<int64_t>(schedule.steps.size()) != cp) {
    throw ShapeError("double ring: chunk count does not match the schedule's d_cp");
  }

  std::vector<BlockResult<T>> acc;
  acc.reserve(cp);
  for (int64_t j = 0; j < cp; ++j) acc.push_back(EmptyBlock(q[j]));
  if (consumed) consumed->assign(cp, {});

  // Chunks are immutable; passing a chunk means handing over its address.
  std::vector<KvChunk<T>> current(cp);
  for (int64_t j = 0; j < cp; ++j) current[j] = {&k[j], &v[j], j};

  auto at = [w](int64_t ring, int64_t slot) { return ring * w + slot; };
  for (int64_t o = 0; o < rings; ++o) {
    // Outer ring: every rank forwards the chunk it starts this step with
    // to the same slot of the next inner ring.
    std::vector<KvChunk<T>> outer_recv(cp);
    if (o + 1 < rings) {
      for (int64_t j = 0; j < cp; ++j) {
        outer_recv[at((j / w + 1) % rings, j % w)] = current[j];
      }
    }
    for (int64_t t = 0; t < w; ++t) {
      std::vector<KvChunk<T>> inner_recv(cp);
      for (int64_t j = 0; j < cp; ++j) {
        const MicroStep& step = schedule.steps[j][o * w + t];
        if (step.outer != o || step.inner != t || step.source != current[j].origin) {
          throw ShapeError("double ring: rank " + std::to_string(j) +
                           " holds chunk " + std::to_string(current[j].origin) +
                           " but the schedule expects " + std::to_string(step.source));
        }
        if (t + 1 < w) inner_recv[at(j / w, (j % w + 1) % w)] = current[j];
        BlockUpdate(acc[j], BlockAttention(q[j], *current[j].k, *current[j].v, causal));
        if (consumed) (*consumed)[j].push_back(current[j].origin);
      }
      if (t + 1 < w) current = std::move(inner_recv);
    }
    if (o + 1 < rings) current = std::move(outer_recv);
  }
  return acc;
}

template <typename T>
Tensor<T> Run2DAttention(const Tensor<T>& q, const Tensor<T>& k,
                         const Tensor<T>& v, const ParallelConfig& par,
                         const RankGrid& grid, const TwoDOptions& options,
                         TwoDRouting* routing) {
  if (grid.hp() != par.hp || grid.cp() != par.cp ||
      grid.inner_ring() != par.inner_ring || grid.placement() != par.placement) {
    throw ConfigError("run_2d_attention: rank grid does not match the parallel config");
  }
  if (q.tokens() != k.tokens() || k.tokens() != v.tokens()) {
    throw ShapeError("run_2d_attention: Q, K, V sequence lengths differ");
  }
  if (k.heads() < 1 || q.heads() % k.heads() != 0) {
    throw ShapeError("run_2d_attention: H mod H_kv != 0");
  }
  if (par.hp > q.heads() || q.heads() % par.hp != 0) {
    throw ConfigError("run_2d_attention: d_hp must divide H and satisfy d_hp <= H");
  }

  const ShardedSeq<T> qs = ShardSequence(q, grid);
  const ShardedSeq<T> ks = KvReplicate(ShardSequence(k, grid), q.heads());
  const ShardedSeq<T> vs = KvReplicate(ShardSequence(v, grid), q.heads());

  const ShardedSeq<T> qh = SeqAlltoAllScatter(qs);
  const ShardedSeq<T> kh = SeqAlltoAllScatter(ks);
  const ShardedSeq<T> vh = SeqAlltoAllScatter(vs);

  const RingSchedule schedule = BuildRingSchedule(par.cp, par.inner_ring);
  ShardedSeq<T> out{Layout::kHeadSharded, grid, q.heads(), q.tokens(), {}, qh.head_offsets};
  out.chunks.resize(grid.size());
  std::vector<std::vector<int64_t>> consumed_by_rank(grid.size());

  for (int64_t i = 0; i < grid.hp(); ++i) {
    const auto ranks = grid.cp_group(i);
    std::vector<Tensor<T>> gq, gk, gv;
    for (int64_t r : ranks) {
      gq.push_back(qh.chunks[r]);
      gk.push_back(kh.chunks[r]);
      gv.push_back(vh.chunks[r]);
    }
    std::vector<std::vector<int64_t>> consumed;
    auto results = RunDoubleRing<T>(gq, gk, gv, schedule, options.causal, &consumed);
    for (int64_t j = 0; j < grid.cp(); ++j) {
      out.chunks[ranks[j]] = std::move(results[j].out);
      consumed_by_rank[ranks[j]] = std::move(consumed[j]);
    }
  }

  if (options.flip_sign_rank) {
    const int64_t r = *options.flip_sign_rank;
    if (r < 0 || r >= grid.size()) throw ConfigError("fault rank out of range");
    for (T& x : out.chunks[r].values()) x = -x;
  }

  if (routing) {
    routing->seq_positions.clear();
    routing->head_positions.clear();
    for (int64_t r = 0; r < grid.size(); ++r) {
      routing->seq_positions.push_back(qs.chunks[r].positions());
      routing->head_positions.push_back(qh.chunks[r].positions());
    }
    routing->q_head_offsets = qh.head_offsets;
    routing->kv_head_offsets = kh.head_offsets;
    routing->replicated_kv_heads = ks.total_heads;
    routing->consumed = consumed_by_rank;
  }

  return Unshard(SeqAlltoAllGather(out));
}

#define HCP_RING_INSTANTIATE(T)                                                \
  template std::vector<BlockResult<T>> RunDoubleRing(                          \
      std::span<const Tensor<T>>, std::span<const Tensor<T>>,                  \
      std::span<const Tensor<T>>, const RingSchedule&, bool,                   \
      std::vector<std::vector<int64_t>>*);                                     \
  template Tensor<T> Run2DAttention(const Tensor<T>&, const Tensor<T>&,        \
                                    const Tensor<T>&, const ParallelConfig&,   \
                                    const RankGrid&, const TwoDOptions&,       \
                                    TwoDRouting*);
HCP_RING_INSTANTIATE(float)
HCP_RING_INSTANTIATE(double)
#undef HCP_RING_INSTANTIATE

}  // namespace hcp
