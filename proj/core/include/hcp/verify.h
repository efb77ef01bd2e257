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

#ifndef HCP_VERIFY_H_
#define HCP_VERIFY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcp/config.h"

namespace hcp {

enum class Precision { kF32, kF64 };

// Largest accepted |2D - reference| for a precision.
double Tolerance(Precision p);

// Desk-scale sequence limit for numerical verification.
inline constexpr int64_t kMaxVerifySeqLen = 256;

struct VerifyCase {
  ModelConfig model;
  ParallelConfig par;
  bool causal = true;

  std::string Label() const;
};

// Every valid (d_hp, d_cp, w, placement) with d_sp in {1, 2, 4, 8, 16} for
// the given model, causal and non-causal.
std::vector<VerifyCase> LatticeForModel(const ModelConfig& model,
                                        const ClusterConfig& cluster);

// LatticeForModel over H in {4, 8}, H_kv in {2, 4, H}, S in {16, 32, 64},
// head_dim 4.
std::vector<VerifyCase> DefaultLattice(const ClusterConfig& cluster);

struct VerifyResult {
  VerifyCase c;
  double max_abs_diff = 0;
  bool pass = false;
};

// Runs 2D attention on seeded random inputs and compares it with
// FullAttention computed in double. Throws ConfigError for invalid cases or
// S above kMaxVerifySeqLen.
VerifyResult RunVerifyCase(const VerifyCase& c, const ClusterConfig& cluster,
                           uint64_t seed, Precision precision,
                           std::optional<int64_t> flip_sign_rank = std::nullopt);

}  // namespace hcp

#endif  // HCP_VERIFY_H_
