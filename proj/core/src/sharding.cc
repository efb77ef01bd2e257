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

#include "hcp/sharding.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "hcp/config.h"

namespace hcp {

Permutation ZigzagReorder(int64_t seq_len, int64_t cp) {
  if (cp < 1 || seq_len < 1 || seq_len % (2 * cp) != 0) {
    throw ConfigError("zigzag reorder requires S mod (2 * d_cp) = 0 (S=" +
                      std::to_string(seq_len) + ", d_cp=" + std::to_string(cp) +
                      ")");
  }
  Permutation p;
  p.order.reserve(seq_len);
  for (int64_t j = 0; j < cp; ++j) {
    auto part = ZigzagPositions(seq_len, cp, j);
    p.order.insert(p.order.end(), part.begin(), part.end());
  }
  p.inverse.assign(seq_len, 0);
  for (int64_t k = 0; k < seq_len; ++k) p.inverse[p.order[k]] = k;
  return p;
}

std::vector<int64_t> ZigzagPositions(int64_t seq_len, int64_t cp,
                                     int64_t cp_index) {
  if (cp < 1 || seq_len % (2 * cp) != 0) {
    throw ConfigError("zigzag reorder requires S mod (2 * d_cp) = 0");
  }
  if (cp_index < 0 || cp_index >= cp) throw ConfigError("cp index out of range");
  const int64_t stripe = seq_len / (2 * cp);
  std::vector<int64_t> out;
  out.reserve(2 * stripe);
  for (int64_t s : {cp_index, 2 * cp - 1 - cp_index}) {
    for (int64_t t = 0; t < stripe; ++t) out.push_back(s * stripe + t);
  }
  return out;
}

namespace {

template <typename T>
Tensor<T> Gather(const Tensor<T>& src, int64_t head_begin, int64_t head_count,
                 const std::vector<int64_t>& rows) {
  std::vector<int64_t> pos;
  pos.reserve(rows.size());
  for (int64_t r : rows) pos.push_back(src.position(r));
  Tensor<T> out(head_count, src.head_dim(), std::move(pos));
  for (int64_t h = 0; h < head_count; ++h) {
    for (size_t t = 0; t < rows.size(); ++t) {
      auto s = src.row(head_begin + h, rows[t]);
      std::copy(s.begin(), s.end(), out.row(h, static_cast<int64_t>(t)).begin());
    }
  }
  return out;
}

void RequireLayout(Layout got, Layout want, const char* op) {
  if (got != want) throw ShapeError(std::string(op) + ": layout mismatch");
}

}  // namespace

template <typename T>
ShardedSeq<T> ShardSequence(const Tensor<T>& global, const RankGrid& grid) {
  const int64_t seq = global.tokens();
  const int64_t sp = grid.size();
  if (seq % (2 * sp) != 0) {
    throw ShapeError("shard_sequence: S mod (2 * d_sp) != 0 (S=" +
                     std::to_string(seq) + ", d_sp=" + std::to_string(sp) + ")");
  }
  for (int64_t t = 0; t < seq; ++t) {
    if (global.position(t) != t) {
      throw ShapeError("shard_sequence: global tensor must be in sequence order");
    }
  }
  ShardedSeq<T> out{Layout::kSeqSharded, grid, global.heads(), seq, {}, {}};
  out.chunks.resize(sp);
  out.head_offsets.assign(sp, 0);
  const int64_t slice = seq / sp;
  for (int64_t j = 0; j < grid.cp(); ++j) {
    const auto stripes = ZigzagPositions(seq, grid.cp(), j);
    for (int64_t i = 0; i < grid.hp(); ++i) {
      std::vector<int64_t> rows(stripes.begin() + i * slice,
                                stripes.begin() + (i + 1) * slice);
      out.chunks[grid.rank(i, j)] = Gather(global, 0, global.heads(), rows);
    }
  }
  return out;
}

template <typename T>
Tensor<T> Unshard(const ShardedSeq<T>& seq) {
  if (seq.chunks.empty()) throw ShapeError("unshard: no chunks");
  const int64_t dim = seq.chunks.front().head_dim();
  Tensor<T> out(seq.total_heads, seq.seq_len, dim);
  std::vector<int64_t> filled(seq.total_heads * seq.seq_len, 0);
  for (size_t r = 0; r < seq.chunks.size(); ++r) {
    const Tensor<T>& c = seq.chunks[r];
    for (int64_t h = 0; h < c.heads(); ++h) {
      const int64_t gh = seq.head_offsets[r] + h;
      for (int64_t t = 0; t < c.tokens(); ++t) {
        const int64_t pos = c.position(t);
        if (gh >= seq.total_heads || pos < 0 || pos >= seq.seq_len) {
          throw ShapeError("unshard: chunk outside the global tensor");
        }
        auto src = c.row(h, t);
        std::copy(src.begin(), src.end(), out.row(gh, pos).begin());
        ++filled[gh * seq.seq_len + pos];
      }
    }
  }
  if (std::any_of(filled.begin(), filled.end(), [](int64_t n) { return n != 1; })) {
    throw ShapeError("unshard: chunks do not cover every (head, token) exactly once");
  }
  return out;
}

template <typename T>
ShardedSeq<T> KvReplicate(const ShardedSeq<T>& kv, int64_t heads) {
  RequireLayout(kv.layout, Layout::kSeqSharded, "kv_replicate");
  const int64_t target = ReplicatedKvHeads(heads, kv.total_heads, kv.grid.hp());
  if (target == kv.total_heads) return kv;
  const int64_t repeat = target / kv.total_heads;
  ShardedSeq<T> out = kv;
  out.total_heads = target;
  for (auto& chunk : out.chunks) {
    Tensor<T> rep(target, chunk.head_dim(), chunk.positions());
    for (int64_t h = 0; h < target; ++h) {
      for (int64_t t = 0; t < chunk.tokens(); ++t) {
        auto src = chunk.row(h / repeat, t);
        std::copy(src.begin(), src.end(), rep.row(h, t).begin());
      }
    }
    chunk = std::move(rep);
  }
  return out;
}

template <typename T>
ShardedSeq<T> SeqAlltoAllScatter(const ShardedSeq<T>& seq) {
  RequireLayout(seq.layout, Layout::kSeqSharded, "seq_alltoall_scatter");
  const RankGrid& grid = seq.grid;
  if (seq.total_heads % grid.hp() != 0) {
    throw ShapeError("seq_alltoall_scatter: head count " +
                     std::to_string(seq.total_heads) + " not divisible by d_hp " +
                     std::to_string(grid.hp()));
  }
  const int64_t local_heads = seq.total_heads / grid.hp();
  ShardedSeq<T> out{Layout::kHeadSharded, grid, seq.total_heads, seq.seq_len, {}, {}};
  out.chunks.resize(grid.size());
  out.head_offsets.assign(grid.size(), 0);
  for (int64_t j = 0; j < grid.cp(); ++j) {
    const auto group = grid.hp_group(j);
    std::vector<int64_t> pos;
    for (int64_t src : group) {
      const auto& p = seq.chunks[src].positions();
      pos.insert(pos.end(), p.begin(), p.end());
    }
    for (int64_t i = 0; i < grid.hp(); ++i) {
      Tensor<T> dst(local_heads, seq.chunks[group[0]].head_dim(), pos);
      int64_t row = 0;
      for (int64_t src : group) {
        const Tensor<T>& c = seq.chunks[src];
        for (int64_t t = 0; t < c.tokens(); ++t, ++row) {
          for (int64_t h = 0; h < local_heads; ++h) {
            auto s = c.row(i * local_heads + h, t);
            std::copy(s.begin(), s.end(), dst.row(h, row).begin());
          }
        }
      }
      const int64_t r = grid.rank(i, j);
      out.chunks[r] = std::move(dst);
      out.head_offsets[r] = i * local_heads;
    }
  }
  return out;
}

template <typename T>
ShardedSeq<T> SeqAlltoAllGather(const ShardedSeq<T>& seq) {
  RequireLayout(seq.layout, Layout::kHeadSharded, "seq_alltoall_gather");
  const RankGrid& grid = seq.grid;
  const int64_t local_heads = seq.total_heads / grid.hp();
  ShardedSeq<T> out{Layout::kSeqSharded, grid, seq.total_heads, seq.seq_len, {}, {}};
  out.chunks.resize(grid.size());
  out.head_offsets.assign(grid.size(), 0);
  for (int64_t j = 0; j < grid.cp(); ++j) {
    const auto group = grid.hp_group(j);
    const Tensor<T>& first = seq.chunks[group[0]];
    if (first.tokens() % grid.hp() != 0) {
      throw ShapeError("seq_alltoall_gather: tokens not divisible by d_hp");
    }
    for (int64_t src : group) {
      if (seq.chunks[src].positions() != first.positions() ||
          seq.chunks[src].heads() != local_heads) {
        throw ShapeError("seq_alltoall_gather: HP group chunks disagree");
      }
    }
    const int64_t slice = first.tokens() / grid.hp();
    for (int64_t i = 0; i < grid.hp(); ++i) {
      std::vector<int64_t> pos(first.positions().begin() + i * slice,
                               first.positions().begin() + (i + 1) * slice);
      Tensor<T> dst(seq.total_heads, first.head_dim(), std::move(pos));
      for (int64_t i2 = 0; i2 < grid.hp(); ++i2) {
        const Tensor<T>& c = seq.chunks[group[i2]];
        for (int64_t h = 0; h < local_heads; ++h) {
          for (int64_t t = 0; t < slice; ++t) {
            auto s = c.row(h, i * slice + t);
            std::copy(s.begin(), s.end(), dst.row(i2 * local_heads + h, t).begin());
          }
        }
      }
      out.chunks[grid.rank(i, j)] = std::move(dst);
    }
  }
  return out;
}

#define HCP_SHARDING_INSTANTIATE(T)                                         \
  template ShardedSeq<T> ShardSequence(const Tensor<T>&, const RankGrid&); \
  template Tensor<T> Unshard(const ShardedSeq<T>&);                        \
  template ShardedSeq<T> KvReplicate(const ShardedSeq<T>&, int64_t);       \
  template ShardedSeq<T> SeqAlltoAllScatter(const ShardedSeq<T>&);         \
  template ShardedSeq<T> SeqAlltoAllGather(const ShardedSeq<T>&);
HCP_SHARDING_INSTANTIATE(float)
HCP_SHARDING_INSTANTIATE(double)
#undef HCP_SHARDING_INSTANTIATE

}  // namespace hcp
