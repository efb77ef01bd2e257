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

#ifndef HCP_TENSOR_H_
#define HCP_TENSOR_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hcp/config.h"

namespace hcp {

// Dense (heads, tokens, head_dim) tensor, row-major. Each token row carries
// the original sequence position it came from, so tensors stay meaningful
// after any permutation or resharding.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  Tensor(int64_t heads, int64_t tokens, int64_t head_dim)
      : heads_(heads), tokens_(tokens), head_dim_(head_dim) {
    if (heads < 0 || tokens < 0 || head_dim < 0) {
      throw ShapeError("negative tensor dimension");
    }
    values_.assign(static_cast<size_t>(heads * tokens * head_dim), T{0});
    positions_.resize(static_cast<size_t>(tokens));
    for (int64_t t = 0; t < tokens; ++t) positions_[t] = t;
  }

  Tensor(int64_t heads, int64_t head_dim, std::vector<int64_t> positions)
      : Tensor(heads, static_cast<int64_t>(positions.size()), head_dim) {
    positions_ = std::move(positions);
  }

  int64_t heads() const { return heads_; }
  int64_t tokens() const { return tokens_; }
  int64_t head_dim() const { return head_dim_; }
  size_t size() const { return values_.size(); }

  T& at(int64_t h, int64_t t, int64_t d) { return values_[Offset(h, t, d)]; }
  const T& at(int64_t h, int64_t t, int64_t d) const {
    return values_[Offset(h, t, d)];
  }

  std::span<T> row(int64_t h, int64_t t) {
    return {values_.data() + Offset(h, t, 0), static_cast<size_t>(head_dim_)};
  }
  std::span<const T> row(int64_t h, int64_t t) const {
    return {values_.data() + Offset(h, t, 0), static_cast<size_t>(head_dim_)};
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  const std::vector<int64_t>& positions() const { return positions_; }
  int64_t position(int64_t t) const { return positions_[t]; }
  void set_positions(std::vector<int64_t> positions) {
    if (static_cast<int64_t>(positions.size()) != tokens_) {
      throw ShapeError("position count does not match token count");
    }
    positions_ = std::move(positions);
  }

  bool same_shape(const Tensor& o) const {
    return heads_ == o.heads_ && tokens_ == o.tokens_ && head_dim_ == o.head_dim_;
  }

  bool operator==(const Tensor&) const = default;

 private:
  size_t Offset(int64_t h, int64_t t, int64_t d) const {
    return static_cast<size_t>((h * tokens_ + t) * head_dim_ + d);
  }

  int64_t heads_ = 0;
  int64_t tokens_ = 0;
  int64_t head_dim_ = 0;
  std::vector<T> values_;
  std::vector<int64_t> positions_;
};

template <typename U, typename T>
Tensor<U> CastTensor(const Tensor<T>& in) {
  Tensor<U> out(in.heads(), in.head_dim(), in.positions());
  auto src = in.values();
  auto dst = out.values();
  for (size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<U>(src[i]);
  return out;
}

// Largest elementwise |a - b|, computed in double. Shapes must match.
template <typename A, typename B>
double MaxAbsDiff(const Tensor<A>& a, const Tensor<B>& b) {
  if (a.heads() != b.heads() || a.tokens() != b.tokens() ||
      a.head_dim() != b.head_dim()) {
    throw ShapeError("MaxAbsDiff: shape mismatch");
  }
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (size_t i = 0; i < av.size(); ++i) {
    double d = std::abs(static_cast<double>(av[i]) - static_cast<double>(bv[i]));
    if (std::isnan(d)) return d;
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace hcp

#endif  // HCP_TENSOR_H_
