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

#ifndef HCP_ATTENTION_H_
#define HCP_ATTENTION_H_

#include <cstdint>
#include <vector>

#include "hcp/tensor.h"

namespace hcp {

// Partial attention of a query block against one key/value block.
// lse[h * tokens + t] is the natural log of the sum of exp(scaled score) over
// the keys admitted for (h, t); -inf marks rows where no key was admitted,
// whose out rows are zero.
template <typename T>
struct BlockResult {
  Tensor<T> out;
  std::vector<T> lse;

  T lse_at(int64_t h, int64_t t) const { return lse[h * out.tokens() + t]; }
};

// Identity element for BlockUpdate, shaped like `query`.
template <typename T>
BlockResult<T> EmptyBlock(const Tensor<T>& query);

// Softmax attention of q against (k, v). q has H heads, k/v have H_kv heads
// and query head h reads kv head h / (H / H_kv). Scores are scaled by
// 1/sqrt(head_dim). With `causal`, query token i sees key j iff
// position(j) <= position(i), using the positions carried by the tensors.
template <typename T>
BlockResult<T> BlockAttention(const Tensor<T>& q, const Tensor<T>& k,
                              const Tensor<T>& v, bool causal);

// Single-device reference: identical math to BlockAttention over the full
// key set, with validation of the GQA grouping.
template <typename T>
BlockResult<T> FullAttention(const Tensor<T>& q, const Tensor<T>& k,
                             const Tensor<T>& v, bool causal);

// Log-sum-exp merge of `blk` into `acc`:
//   lse' = logaddexp(acc.lse, blk.lse)
//   out' = acc.out * exp(acc.lse - lse') + blk.out * exp(blk.lse - lse')
// -inf rows on either side act as the identity.
template <typename T>
void BlockUpdate(BlockResult<T>& acc, const BlockResult<T>& blk);

template <typename T>
BlockResult<T> Merge(BlockResult<T> acc, const BlockResult<T>& blk) {
  BlockUpdate(acc, blk);
  return acc;
}

template <typename T>
struct AttentionGrads {
  Tensor<T> dq;
  Tensor<T> dk;  // H_kv heads; replicated query heads accumulate here
  Tensor<T> dv;
};

// Analytic gradients of FullAttention's output w.r.t. q, k and v given the
// upstream gradient dout (shaped like q).
template <typename T>
AttentionGrads<T> AttentionBackward(const Tensor<T>& q, const Tensor<T>& k,
                                    const Tensor<T>& v, const Tensor<T>& dout,
                                    bool causal);

extern template BlockResult<float> EmptyBlock(const Tensor<float>&);
extern template BlockResult<double> EmptyBlock(const Tensor<double>&);
extern template BlockResult<float> BlockAttention(const Tensor<float>&,
                                                  const Tensor<float>&,
                                                  const Tensor<float>&, bool);
extern template BlockResult<double> BlockAttention(const Tensor<double>&,
                                                   const Tensor<double>&,
                                                   const Tensor<double>&, bool);
extern template BlockResult<float> FullAttention(const Tensor<float>&,
                                                 const Tensor<float>&,
                                                 const Tensor<float>&, bool);
extern template BlockResult<double> FullAttention(const Tensor<double>&,
                                                  const Tensor<double>&,
                                                  const Tensor<double>&, bool);
extern template void BlockUpdate(BlockResult<float>&, const BlockResult<float>&);
extern template void BlockUpdate(BlockResult<double>&,
                                 const BlockResult<double>&);
extern template AttentionGrads<float> AttentionBackward(
    const Tensor<float>&, const Tensor<float>&, const Tensor<float>&,
    const Tensor<float>&, bool);
extern template AttentionGrads<double> AttentionBackward(
    const Tensor<double>&, const Tensor<double>&, const Tensor<double>&,
    const Tensor<double>&, bool);

}  // namespace hcp

#endif  // HCP_ATTENTION_H_
