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

#ifndef HCP_CONFIG_H_
#define HCP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hcp {

// Raised for configurations that violate a structural invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for tensor shape / layout mismatches.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transformer shape. All sizes are in elements unless suffixed with _bytes.
struct ModelConfig {
  int64_t seq_len = 0;        // S
  int64_t heads = 0;          // H
  int64_t kv_heads = 0;       // H_kv (== heads for MHA)
  int64_t hidden = 0;         // D
  int64_t layers = 1;
  int64_t global_batch = 0;   // B, in tokens
  int64_t elem_bytes = 2;     // activations / KV (FP16)
  int64_t lse_bytes = 4;      // softmax log-sum-exp (FP32)
  // Parameter count for model-state memory. 0 means estimate 12 * layers * D^2.
  int64_t param_count = 0;

  int64_t head_dim() const { return heads > 0 ? hidden / heads : 0; }
  int64_t groups() const { return kv_heads > 0 ? heads / kv_heads : 0; }
  int64_t effective_param_count() const {
    return param_count > 0 ? param_count : 12 * layers * hidden * hidden;
  }

  bool operator==(const ModelConfig&) const = default;
};

enum class Placement { kHeadFirst, kContextFirst };

std::string_view PlacementName(Placement p);
std::optional<Placement> ParsePlacement(std::string_view name);

struct ParallelConfig {
  int64_t dp = 1;          // d_dp, only used by memory/scalability math
  int64_t hp = 1;          // d_hp
  int64_t cp = 1;          // d_cp
  int64_t inner_ring = 1;  // w
  Placement placement = Placement::kHeadFirst;

  int64_t sp() const { return hp * cp; }
  int64_t outer_ring() const { return inner_ring > 0 ? cp / inner_ring : 0; }

  bool operator==(const ParallelConfig&) const = default;
};

// Node topology and rate constants. Defaults describe an 8-GPU node with
// four 200 Gb/s NICs and NVLINK; every field can be overridden.
struct ClusterConfig {
  int64_t gpus_per_node = 8;
  int64_t nics_per_node = 4;
  double nic_bw = 25e9;        // bytes/s, unidirectional, per NIC
  double nvlink_bw = 300e9;    // bytes/s, unidirectional, per GPU
  double p2p_latency_intra = 30e-6;
  double p2p_latency_inter = 170e-6;
  double alltoall_latency = 100e-6;
  double peak_flops = 312e12;  // per GPU
  double efficiency = 0.5;     // achieved fraction of peak_flops
  // Direct override of the forward proportionality constant (seconds per
  // S^2*D unit). When unset it is derived from peak_flops * efficiency.
  std::optional<double> alpha_fwd;
  // Per-GPU memory capacity used by the planner's feasibility filter.
  std::optional<double> gpu_mem_bytes;

  // Causal attention forward costs 2*S^2*D FLOPs (halved for the mask).
  double alpha() const {
    return alpha_fwd ? *alpha_fwd : 2.0 / (peak_flops * efficiency);
  }

  bool operator==(const ClusterConfig&) const = default;
};

struct Violation {
  std::string code;     // stable identifier, e.g. "hp_le_heads"
  std::string message;  // human readable, names the invariant
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(std::string_view code) const;
  std::string ToString() const;
};

ValidationReport ValidateModel(const ModelConfig& model);
ValidationReport ValidateCluster(const ClusterConfig& cluster);
ValidationReport Validate(const ModelConfig& model, const ParallelConfig& par,
                          const ClusterConfig& cluster);

// Throws ConfigError carrying the full report when validation fails.
void ValidateOrThrow(const ModelConfig& model, const ParallelConfig& par,
                     const ClusterConfig& cluster);

// KV head count after replication: the smallest multiple of kv_heads that
// hp divides. Equals max(kv_heads, hp) whenever one divides the other.
int64_t ReplicatedKvHeads(int64_t heads, int64_t kv_heads, int64_t hp);

}  // namespace hcp

#endif  // HCP_CONFIG_H_
