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

#include "hcp/config.h"

#include <numeric>
#include <sstream>

namespace hcp {

std::string_view PlacementName(Placement p) {
  switch (p) {
    case Placement::kHeadFirst:
      return "head_first";
    case Placement::kContextFirst:
      return "context_first";
  }
  return "unknown";
}

std::optional<Placement> ParsePlacement(std::string_view name) {
  if (name == "head_first" || name == "HeadFirst") return Placement::kHeadFirst;
  if (name == "context_first" || name == "ContextFirst") {
    return Placement::kContextFirst;
  }
  return std::nullopt;
}

bool ValidationReport::Has(std::string_view code) const {
  for (const auto& v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

std::string ValidationReport::ToString() const {
  std::ostringstream os;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].message;
  }
  return os.str();
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void Require(bool ok, std::string code, std::string message) {
    if (!ok) report_.violations.push_back({std::move(code), std::move(message)});
  }

 private:
  ValidationReport& report_;
};

}  // namespace

ValidationReport ValidateModel(const ModelConfig& m) {
  ValidationReport report;
  Checker c(report);
  c.Require(m.seq_len >= 1, "seq_len_positive", "S >= 1");
  c.Require(m.heads >= 1, "heads_positive", "H >= 1");
  c.Require(m.kv_heads >= 1, "kv_heads_positive", "H_kv >= 1");
  c.Require(m.hidden >= 1, "hidden_positive", "D >= 1");
  c.Require(m.layers >= 1, "layers_positive", "layers >= 1");
  c.Require(m.elem_bytes >= 1, "elem_bytes_positive", "elem_bytes >= 1");
  c.Require(m.lse_bytes >= 1, "lse_bytes_positive", "lse_bytes >= 1");
  c.Require(m.param_count >= 0, "param_count_nonnegative", "param_count >= 0");
  if (m.heads >= 1 && m.kv_heads >= 1) {
    c.Require(m.heads % m.kv_heads == 0, "gqa_groups_integral",
              "H mod H_kv = 0 (GQA groups must be integral)");
  }
  if (m.heads >= 1 && m.hidden >= 1) {
    c.Require(m.hidden % m.heads == 0, "head_dim_integral", "D mod H = 0");
  }
  c.Require(m.global_batch >= m.seq_len, "batch_ge_seq", "B >= S");
  return report;
}

ValidationReport ValidateCluster(const ClusterConfig& cl) {
  ValidationReport report;
  Checker c(report);
  c.Require(cl.gpus_per_node >= 1, "gpus_per_node_positive",
            "gpus_per_node >= 1");
  c.Require(cl.nics_per_node >= 1, "nics_per_node_positive",
            "nics_per_node >= 1");
  c.Require(cl.nic_bw > 0, "nic_bw_positive", "nic_bw > 0");
  c.Require(cl.nvlink_bw > 0, "nvlink_bw_positive", "nvlink_bw > 0");
  c.Require(cl.p2p_latency_intra > 0, "latency_intra_positive",
            "p2p_latency_intra > 0");
  c.Require(cl.p2p_latency_inter > 0, "latency_inter_positive",
            "p2p_latency_inter > 0");
  c.Require(cl.alltoall_latency > 0, "alltoall_latency_positive",
            "alltoall_latency > 0");
  c.Require(cl.peak_flops > 0, "peak_flops_positive", "peak_flops > 0");
  c.Require(cl.efficiency > 0 && cl.efficiency <= 1, "efficiency_range",
            "0 < efficiency <= 1");
  c.Require(!cl.alpha_fwd || *cl.alpha_fwd > 0, "alpha_positive",
            "alpha_fwd > 0");
  c.Require(!cl.gpu_mem_bytes || *cl.gpu_mem_bytes > 0, "gpu_mem_positive",
            "gpu_mem_bytes > 0");
  return report;
}

ValidationReport Validate(const ModelConfig& model, const ParallelConfig& par,
                          const ClusterConfig& cluster) {
  ValidationReport report = ValidateModel(model);
  Checker c(report);
  c.Require(par.dp >= 1, "dp_positive", "d_dp >= 1");
  c.Require(par.hp >= 1, "hp_positive", "d_hp >= 1");
  c.Require(par.cp >= 1, "cp_positive", "d_cp >= 1");
  c.Require(par.inner_ring >= 1 && par.inner_ring <= par.cp,
            "inner_ring_range", "1 <= w <= d_cp");
  if (par.inner_ring >= 1 && par.cp >= 1) {
    c.Require(par.cp % par.inner_ring == 0, "inner_ring_divides_cp",
              "w divides d_cp");
  }
  if (par.hp >= 1 && model.heads >= 1) {
    c.Require(par.hp <= model.heads, "hp_le_heads", "d_hp <= H");
    if (par.hp <= model.heads) {
      c.Require(model.heads % par.hp == 0, "hp_divides_heads",
                "d_hp divides H (heads split evenly across HP ranks)");
    }
  }
  if (par.hp >= 1 && par.cp >= 1 && model.seq_len >= 1) {
    c.Require(model.seq_len % (2 * par.sp()) == 0, "seq_divisible",
              "S mod (2 * d_sp) = 0 (two zigzag stripes per CP rank)");
  }
  for (auto& v : ValidateCluster(cluster).violations) {
    report.violations.push_back(std::move(v));
  }
  return report;
}

void ValidateOrThrow(const ModelConfig& model, const ParallelConfig& par,
                     const ClusterConfig& cluster) {
  ValidationReport report = Validate(model, par, cluster);
  if (!report.ok()) throw ConfigError("invalid configuration: " + report.ToString());
}

int64_t ReplicatedKvHeads(int64_t heads, int64_t kv_heads, int64_t hp) {
  if (hp < 1 || kv_heads < 1) throw ConfigError("d_hp and H_kv must be >= 1");
  if (hp > heads) {
    throw ConfigError("d_hp <= H violated: cannot replicate KV beyond H heads");
  }
  return std::lcm(kv_heads, hp);
}

}  // namespace hcp
