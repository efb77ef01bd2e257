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

#ifndef HCP_RNG_H_
#define HCP_RNG_H_

#include <cstdint>

#include "hcp/tensor.h"

namespace hcp {

// Counter-based SplitMix64: the n-th draw of a stream is a pure function of
// (seed, stream, n), so results do not depend on call order or platform.
inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t CounterDraw(uint64_t seed, uint64_t stream, uint64_t n) {
  return SplitMix64(SplitMix64(seed ^ SplitMix64(stream)) + n);
}

// Uniform in [0, 1) with 53 random bits.
inline double CounterUniform(uint64_t seed, uint64_t stream, uint64_t n) {
  return static_cast<double>(CounterDraw(seed, stream, n) >> 11) * 0x1.0p-53;
}

// Fills `t` with uniform values in [-1, 1), row-major over (head, pos, dim).
template <typename T>
void FillUniform(Tensor<T>& t, uint64_t seed, uint64_t stream) {
  auto v = t.values();
  for (size_t n = 0; n < v.size(); ++n) {
    v[n] = static_cast<T>(2.0 * CounterUniform(seed, stream, n) - 1.0);
  }
}

template <typename T>
Tensor<T> RandomTensor(int64_t heads, int64_t tokens, int64_t dim, uint64_t seed,
                       uint64_t stream) {
  Tensor<T> t(heads, tokens, dim);
  FillUniform(t, seed, stream);
  return t;
}

}  // namespace hcp

#endif  // HCP_RNG_H_
