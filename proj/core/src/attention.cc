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

#include "hcp/attention.h"

#include <cmath>
#include <limits>
#include <string>

namespace hcp {
namespace {

template <typename T>
constexpr T kNegInf = -std::numeric_limits<T>::infinity();

template <typename T>
void CheckQkv(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v) {
  if (q.head_dim() != k.head_dim() || k.head_dim() != v.head_dim()) {
    throw ShapeError("attention: head_dim mismatch");
  }
  if (k.heads() != v.heads() || k.tokens() != v.tokens()) {
    throw ShapeError("attention: K and V shapes differ");
  }
  if (k.positions() != v.positions()) {
    throw ShapeError("attention: K and V carry different token positions");
  }
  if (k.heads() < 1 || q.heads() % k.heads() != 0) {
    throw ShapeError("attention: H mod H_kv != 0 (H=" + std::to_string(q.heads()) +
                     ", H_kv=" + std::to_string(k.heads()) + ")");
  }
}

template <typename T>
T Dot(std::span<const T> a, std::span<const T> b) {
  T acc{0};
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

template <typename T>
BlockResult<T> EmptyBlock(const Tensor<T>& query) {
  BlockResult<T> r{Tensor<T>(query.heads(), query.head_dim(), query.positions()),
                   {}};
  r.lse.assign(static_cast<size_t>(query.heads() * query.tokens()), kNegInf<T>);
  return r;
}

template <typename T>
BlockResult<T> BlockAttention(const Tensor<T>& q, const Tensor<T>& k,
                              const Tensor<T>& v, bool causal) {
  CheckQkv(q, k, v);
  const int64_t group = q.heads() / k.heads();
  const T scale = T{1} / std::sqrt(static_cast<T>(q.head_dim()));
  BlockResult<T> r = EmptyBlock(q);
  std::vector<T> scores(static_cast<size_t>(k.tokens()));
  std::vector<char> admitted(static_cast<size_t>(k.tokens()));

  for (int64_t h = 0; h < q.heads(); ++h) {
    const int64_t kvh = h / group;
    for (int64_t t = 0; t < q.tokens(); ++t) {
      const int64_t qpos = q.position(t);
      T max_score = kNegInf<T>;
      for (int64_t s = 0; s < k.tokens(); ++s) {
        admitted[s] = !causal || k.position(s) <= qpos;
        if (!admitted[s]) continue;
        scores[s] = Dot(q.row(h, t), k.row(kvh, s)) * scale;
        max_score = std::max(max_score, scores[s]);
      }
      if (max_score == kNegInf<T>) continue;

      T denom{0};
      for (int64_t s = 0; s < k.tokens(); ++s) {
        if (admitted[s]) denom += std::exp(scores[s] - max_score);
      }
      const T lse = max_score + std::log(denom);
      auto out = r.out.row(h, t);
      for (int64_t s = 0; s < k.tokens(); ++s) {
        if (!admitted[s]) continue;
        const T p = std::exp(scores[s] - lse);
        auto vrow = v.row(kvh, s);
        for (size_t d = 0; d < out.size(); ++d) out[d] += p * vrow[d];
      }
      r.lse[h * q.tokens() + t] = lse;
    }
  }
  return r;
}

template <typename T>
BlockResult<T> FullAttention(const Tensor<T>& q, const Tensor<T>& k,
                             const Tensor<T>& v, bool causal) {
  return BlockAttention(q, k, v, causal);
}

template <typename T>
void BlockUpdate(BlockResult<T>& acc, const BlockResult<T>& blk) {
  if (!acc.out.same_shape(blk.out) || acc.lse.size() != blk.lse.size()) {
    throw ShapeError("BlockUpdate: shape mismatch");
  }
  const int64_t tokens = acc.out.tokens();
  for (int64_t h = 0; h < acc.out.heads(); ++h) {
    for (int64_t t = 0; t < tokens; ++t) {
      const size_t i = static_cast<size_t>(h * tokens + t);
      const T a = acc.lse[i];
      const T b = blk.lse[i];
      if (b == kNegInf<T>) continue;
      auto out = acc.out.row(h, t);
      auto add = blk.out.row(h, t);
      if (a == kNegInf<T>) {
        std::copy(add.begin(), add.end(), out.begin());
        acc.lse[i] = b;
        continue;
      }
      const T hi = std::max(a, b);
      const T merged = hi + std::log1p(std::exp(-std::abs(a - b)));
      const T wa = std::exp(a - merged);
      const T wb = std::exp(b - merged);
      for (size_t d = 0; d < out.size(); ++d) out[d] = out[d] * wa + add[d] * wb;
      acc.lse[i] = merged;
    }
  }
}

template <typename T>
AttentionGrads<T> AttentionBackward(const Tensor<T>& q, const Tensor<T>& k,
                                    const Tensor<T>& v, const Tensor<T>& dout,
                                    bool causal) {
  CheckQkv(q, k, v);
  if (!dout.same_shape(q)) throw ShapeError("AttentionBackward: dout shape != q shape");
  const int64_t group = q.heads() / k.heads();
  const T scale = T{1} / std::sqrt(static_cast<T>(q.head_dim()));
  const BlockResult<T> fwd = BlockAttention(q, k, v, causal);

  AttentionGrads<T> g{Tensor<T>(q.heads(), q.head_dim(), q.positions()),
                      Tensor<T>(k.heads(), k.head_dim(), k.positions()),
                      Tensor<T>(v.heads(), v.head_dim(), v.positions())};
  for (int64_t h = 0; h < q.heads(); ++h) {
    const int64_t kvh = h / group;
    for (int64_t t = 0; t < q.tokens(); ++t) {
      const T lse = fwd.lse_at(h, t);
      if (lse == kNegInf<T>) continue;
      const auto do_row = dout.row(h, t);
      // D_t = sum_d dO * O, the softmax Jacobian's diagonal correction.
      const T delta = Dot(do_row, fwd.out.row(h, t));
      auto dq = g.dq.row(h, t);
      for (int64_t s = 0; s < k.tokens(); ++s) {
        if (causal && k.position(s) > q.position(t)) continue;
        const T p = std::exp(Dot(q.row(h, t), k.row(kvh, s)) * scale - lse);
        const T dp = Dot(do_row, v.row(kvh, s));
        const T ds = p * (dp - delta) * scale;
        auto dv = g.dv.row(kvh, s);
        auto dk = g.dk.row(kvh, s);
        auto krow = k.row(kvh, s);
        auto qrow = q.row(h, t);
        for (size_t d = 0; d < dq.size(); ++d) {
          dv[d] += p * do_row[d];
          dq[d] += ds * krow[d];
          dk[d] += ds * qrow[d];
        }
      }
    }
  }
  return g;
}

template BlockResult<float> EmptyBlock(const Tensor<float>&);
template BlockResult<double> EmptyBlock(const Tensor<double>&);
template BlockResult<float> BlockAttention(const Tensor<float>&,
                                           const Tensor<float>&,
                                           const Tensor<float>&, bool);
template BlockResult<double> BlockAttention(const Tensor<double>&,
                                            const Tensor<double>&,
                                            const Tensor<double>&, bool);
template BlockResult<float> FullAttention(const Tensor<float>&,
                                          const Tensor<float>&,
                                          const Tensor<float>&, bool);
template BlockResult<double> FullAttention(const Tensor<double>&,
                                           const Tensor<double>&,
                                           const Tensor<double>&, bool);
template void BlockUpdate(BlockResult<float>&, const BlockResult<float>&);
template void BlockUpdate(BlockResult<double>&, const BlockResult<double>&);
template AttentionGrads<float> AttentionBackward(const Tensor<float>&,
                                                 const Tensor<float>&,
                                                 const Tensor<float>&,
                                                 const Tensor<float>&, bool);
template AttentionGrads<double> AttentionBackward(const Tensor<double>&,
                                                  const Tensor<double>&,
                                                  const Tensor<double>&,
                                                  const Tensor<double>&, bool);

}  // namespace hcp
