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

#ifndef HCP_COST_MODEL_H_
#define HCP_COST_MODEL_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcp/config.h"
#include "hcp/rank_grid.h"

namespace hcp {

enum class Phase { kForward, kBackward };
enum class LinkClass { kIntraNvlink, kInterNic };
enum class CheckpointMode { kFull, kSelectivePlusPlus, kNone };

// Backward passes circulate KV chunks together with their gradients.
inline constexpr double kBackwardP2pFactor = 2.0;
// Backward attention costs three forward passes.
inline constexpr double kBackwardComputeFactor = 3.0;
// Mixed-precision Adam: fp16 weights + fp16 grads + fp32 master, m and v.
inline constexpr double kModelStateBytesPerParam = 16.0;

// Compute time of one ring micro-step: alpha * S^2 * D / (d_cp * d_sp)
// forward, three times that backward.
double CompTime(const ModelConfig& model, const ParallelConfig& par,
                const ClusterConfig& cluster, Phase phase);

// Bytes of one KV chunk after replication:
//   Hkv_hat / H * 4 * S * D / d_sp, scaled by elem_bytes / 2.
double SizeKv(const ModelConfig& model, const ParallelConfig& par);
// Bytes of one Q (equivalently output) chunk: 2 * S * D / d_sp at FP16.
double SizeQ(const ModelConfig& model, const ParallelConfig& par);
inline double SizeOut(const ModelConfig& model, const ParallelConfig& par) {
  return SizeQ(model, par);
}

// latency(link) + bytes * contention / bandwidth(link). `contention` is the
// number of flows sharing the link's bandwidth evenly.
double P2pTime(double bytes, LinkClass link, double contention,
               const ClusterConfig& cluster);

// One concurrent point-to-point transfer between two ranks.
struct Hop {
  int64_t src = 0;
  int64_t dst = 0;
  int64_t src_slot = 0;  // inner ring slot of the sender
  LinkClass link = LinkClass::kIntraNvlink;
  double contention = 1.0;
};

// Hops of one inner-ring micro-step across all CP groups. Inter-node hops
// share their node's NICs: contention = max(1, flows / nics_per_node) with
// flows counted per node on the sending and receiving side.
std::vector<Hop> InnerRingHops(const RankGrid& grid, const ClusterConfig& cluster);
// Hops of one outer-ring step across all CP groups (empty if d_cp / w == 1).
std::vector<Hop> OuterRingHops(const RankGrid& grid, const ClusterConfig& cluster);

// Slowest transfer of a hop set; 0 for an empty set.
double SlowestHopTime(const std::vector<Hop>& hops, double bytes,
                      const ClusterConfig& cluster);

struct RingTiming {
  double comp = 0;        // per micro-step
  double p2p_inner = 0;   // slowest inner-ring hop
  double p2p_outer = 0;   // slowest outer-ring hop (wrap hop if w == d_cp)
  double a = 0;           // max(comp, p2p_inner)
  double b = 0;           // max(comp, p2p_outer)
  double inner_ring = 0;  // a * (w - 1) + b
};

RingTiming InnerRingTiming(const ModelConfig& model, const ParallelConfig& par,
                           const ClusterConfig& cluster, const RankGrid& grid,
                           Phase phase);

inline double InnerRingTime(const ModelConfig& model, const ParallelConfig& par,
                            const ClusterConfig& cluster, const RankGrid& grid,
                            Phase phase) {
  return InnerRingTiming(model, par, cluster, grid, phase).inner_ring;
}

// Bytes each GPU sends in the SeqAlltoAlls of one phase:
//   (Size(q) + Size(out) + Size(kv)) * (d_hp - 1) / d_hp
double AlltoallVolume(const ModelConfig& model, const ParallelConfig& par);

struct AlltoallSplit {
  double in = 0;   // bytes sent by the collective ahead of the ring
  double out = 0;  // bytes sent by the collective after the ring
};
// Forward: Q,K,V in, O out. Backward: dO in, dQ,dK,dV out.
AlltoallSplit AlltoallPhaseVolumes(const ModelConfig& model,
                                   const ParallelConfig& par, Phase phase);

// Link class of the SeqAlltoAll: intra iff every HP group sits on one node.
LinkClass AlltoallLinkClass(const RankGrid& grid);
double AlltoallContention(const RankGrid& grid, const ClusterConfig& cluster);

// Time of one SeqAlltoAll moving `volume` bytes per GPU. 0 when d_hp == 1.
double AlltoallTime(double volume, const RankGrid& grid,
                    const ClusterConfig& cluster);

struct CostReport {
  double t_comp_fwd = 0;
  double t_comp_bwd = 0;
  double size_kv = 0;
  double size_q = 0;
  double size_out = 0;
  double replicated_kv_heads = 0;
  double t_p2p_inner_fwd = 0;
  double t_p2p_outer_fwd = 0;
  double t_p2p_inner_bwd = 0;
  double t_p2p_outer_bwd = 0;
  double t_inner_ring_fwd = 0;
  double t_inner_ring_bwd = 0;
  double outer_steps = 0;
  double alltoall_volume = 0;
  double t_seqalltoall = 0;  // forward + backward
  double objective = 0;
  double bwd_p2p_factor = kBackwardP2pFactor;
  // Bytes per GPU over one layer's forward + backward, by link class.
  double p2p_bytes_intra = 0;
  double p2p_bytes_inter = 0;
  double alltoall_bytes = 0;
  LinkClass alltoall_link = LinkClass::kIntraNvlink;
};

// objective = T_SeqAlltoAll + (T_inner_ring_fwd + T_inner_ring_bwd) * d_cp / w
CostReport Objective(const ModelConfig& model, const ParallelConfig& par,
                     const ClusterConfig& cluster, const RankGrid& grid);

struct MemoryReport {
  double activation_bytes_per_layer = 0;
  double checkpoint_extra_bytes_per_layer = 0;
  double kv_buffer_bytes = 0;
  double model_state_bytes = 0;
  double total_bytes = 0;
};

// Per-GPU memory. Layer inputs (2SD/d_sp) are always kept; Selective
// Checkpoint++ also keeps attention output and lse ((2SD + 4SH)/d_sp); no
// attention checkpointing keeps QKV and lse ((6SD + 4SH)/d_sp). Double-ring
// needs a second KV buffer for the outer ring. Model states are sharded
// over `zero_shard_degree` GPUs (at most d_dp * d_sp).
MemoryReport MemoryEstimate(const ModelConfig& model, const ParallelConfig& par,
                            CheckpointMode checkpoint, int64_t zero_shard_degree);

enum class AttentionMode { kHeadParallel, kTwoD };

struct ScalabilityReport {
  AttentionMode mode = AttentionMode::kTwoD;
  std::optional<int64_t> max_sp;    // nullopt: unbounded
  int64_t max_dp = 0;
  std::optional<int64_t> max_gpus;  // nullopt: unbounded
  int64_t pipeline_stages = 1;
  int64_t dp = 1;
  int64_t micro_batches = 0;
  double bubble_rate = 0;
};

// Head-parallel attention caps d_sp at H (KV replication lifts the H_kv cap
// only up to H); the 2D scheme has no cap. d_dp is capped by B / S. The
// bubble rate is the 1F1B ratio (p - 1) / m with m = floor(B / (S * d_dp)).
ScalabilityReport Scalability(const ModelConfig& model, AttentionMode mode,
                              int64_t pipeline_stages = 1, int64_t dp = 1);

double BubbleRate(int64_t pipeline_stages, int64_t micro_batches);

nlohmann::json ToJson(const CostReport& report);
nlohmann::json ToJson(const MemoryReport& report);
nlohmann::json ToJson(const ScalabilityReport& report);

}  // namespace hcp

#endif  // HCP_COST_MODEL_H_
