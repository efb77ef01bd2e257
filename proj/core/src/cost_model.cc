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

#include "hcp/cost_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hcp {

double CompTime(const ModelConfig& model, const ParallelConfig& par,
                const ClusterConfig& cluster, Phase phase) {
  const double s = static_cast<double>(model.seq_len);
  double fwd = cluster.alpha() * s * s * static_cast<double>(model.hidden) /
               static_cast<double>(par.cp * par.sp());
  // Drop the two lowest mantissa bits so 3 * fwd is exact and bwd / fwd == 3.
  int exp = 0;
  const double mant = std::frexp(fwd, &exp);
  fwd = std::ldexp(std::round(std::ldexp(mant, 51)), exp - 51);
  return phase == Phase::kForward ? fwd : kBackwardComputeFactor * fwd;
}

double SizeKv(const ModelConfig& model, const ParallelConfig& par) {
  const double kv_heads = static_cast<double>(
      ReplicatedKvHeads(model.heads, model.kv_heads, par.hp));
  return kv_heads / static_cast<double>(model.heads) * 4.0 *
         static_cast<double>(model.seq_len) * static_cast<double>(model.hidden) /
         static_cast<double>(par.sp()) * (static_cast<double>(model.elem_bytes) / 2.0);
}

double SizeQ(const ModelConfig& model, const ParallelConfig& par) {
  return 2.0 * static_cast<double>(model.seq_len) *
         static_cast<double>(model.hidden) / static_cast<double>(par.sp()) *
         (static_cast<double>(model.elem_bytes) / 2.0);
}

double P2pTime(double bytes, LinkClass link, double contention,
               const ClusterConfig& cluster) {
  if (link == LinkClass::kIntraNvlink) {
    return cluster.p2p_latency_intra + bytes * contention / cluster.nvlink_bw;
  }
  return cluster.p2p_latency_inter + bytes * contention / cluster.nic_bw;
}

namespace {

// Fills link class and contention for a set of concurrent hops.
void AssignContention(std::vector<Hop>& hops, const RankGrid& grid,
                      const ClusterConfig& cluster) {
  std::map<int64_t, int64_t> out_flows;
  std::map<int64_t, int64_t> in_flows;
  for (Hop& h : hops) {
    h.link = grid.same_node(h.src, h.dst) ? LinkClass::kIntraNvlink
                                          : LinkClass::kInterNic;
    if (h.link == LinkClass::kInterNic) {
      ++out_flows[grid.node_of(h.src)];
      ++in_flows[grid.node_of(h.dst)];
    }
  }
  const double nics = static_cast<double>(cluster.nics_per_node);
  for (Hop& h : hops) {
    if (h.link == LinkClass::kIntraNvlink) {
      h.contention = 1.0;
      continue;
    }
    const double flows = static_cast<double>(
        std::max(out_flows[grid.node_of(h.src)], in_flows[grid.node_of(h.dst)]));
    h.contention = std::max(1.0, flows / nics);
  }
}

}  // namespace

std::vector<Hop> InnerRingHops(const RankGrid& grid, const ClusterConfig& cluster) {
  std::vector<Hop> hops;
  const int64_t w = grid.inner_ring();
  if (w < 2) return hops;
  for (int64_t i = 0; i < grid.hp(); ++i) {
    for (int64_t j = 0; j < grid.cp(); ++j) {
      const int64_t ring = grid.ring_of(j);
      const int64_t slot = grid.slot_of(j);
      const int64_t next = grid.cp_index_of(ring, (slot + 1) % w);
      hops.push_back({grid.rank(i, j), grid.rank(i, next), slot});
    }
  }
  AssignContention(hops, grid, cluster);
  return hops;
}

std::vector<Hop> OuterRingHops(const RankGrid& grid, const ClusterConfig& cluster) {
  std::vector<Hop> hops;
  const int64_t rings = grid.outer_ring();
  if (rings < 2) return hops;
  for (int64_t i = 0; i < grid.hp(); ++i) {
    for (int64_t j = 0; j < grid.cp(); ++j) {
      const int64_t slot = grid.slot_of(j);
      const int64_t next = grid.cp_index_of((grid.ring_of(j) + 1) % rings, slot);
      hops.push_back({grid.rank(i, j), grid.rank(i, next), slot});
    }
  }
  AssignContention(hops, grid, cluster);
  return hops;
}

double SlowestHopTime(const std::vector<Hop>& hops, double bytes,
                      const ClusterConfig& cluster) {
  double worst = 0.0;
  for (const Hop& h : hops) {
    worst = std::max(worst, P2pTime(bytes, h.link, h.contention, cluster));
  }
  return worst;
}

RingTiming InnerRingTiming(const ModelConfig& model, const ParallelConfig& par,
                           const ClusterConfig& cluster, const RankGrid& grid,
                           Phase phase) {
  const double bytes =
      SizeKv(model, par) * (phase == Phase::kBackward ? kBackwardP2pFactor : 1.0);
  RingTiming r;
  r.comp = CompTime(model, par, cluster, phase);
  const auto inner = InnerRingHops(grid, cluster);
  r.p2p_inner = SlowestHopTime(inner, bytes, cluster);
  if (grid.outer_ring() > 1) {
    r.p2p_outer = SlowestHopTime(OuterRingHops(grid, cluster), bytes, cluster);
  } else {
    // Single inner ring: the last micro-step waits on the wrap hop.
    std::vector<Hop> wrap;
    for (const Hop& h : inner) {
      if (h.src_slot == grid.inner_ring() - 1) wrap.push_back(h);
    }
    r.p2p_outer = SlowestHopTime(wrap, bytes, cluster);
  }
  r.a = std::max(r.comp, r.p2p_inner);
  r.b = std::max(r.comp, r.p2p_outer);
  r.inner_ring = r.a * static_cast<double>(par.inner_ring - 1) + r.b;
  return r;
}

double AlltoallVolume(const ModelConfig& model, const ParallelConfig& par) {
  const double hp = static_cast<double>(par.hp);
  return (SizeQ(model, par) + SizeOut(model, par) + SizeKv(model, par)) *
         (hp - 1.0) / hp;
}

AlltoallSplit AlltoallPhaseVolumes(const ModelConfig& model,
                                   const ParallelConfig& par, Phase phase) {
  const double hp = static_cast<double>(par.hp);
  const double f = (hp - 1.0) / hp;
  const double qkv = (SizeQ(model, par) + SizeKv(model, par)) * f;
  const double o = SizeOut(model, par) * f;
  if (phase == Phase::kForward) return {qkv, o};
  return {o, qkv};
}

LinkClass AlltoallLinkClass(const RankGrid& grid) {
  for (int64_t j = 0; j < grid.cp(); ++j) {
    const auto group = grid.hp_group(j);
    for (int64_t r : group) {
      if (!grid.same_node(r, group.front())) return LinkClass::kInterNic;
    }
  }
  return LinkClass::kIntraNvlink;
}

double AlltoallContention(const RankGrid& grid, const ClusterConfig& cluster) {
  std::map<int64_t, int64_t> senders;
  for (int64_t j = 0; j < grid.cp(); ++j) {
    const auto group = grid.hp_group(j);
    const bool spans = std::any_of(group.begin(), group.end(), [&](int64_t r) {
      return !grid.same_node(r, group.front());
    });
    if (!spans) continue;
    for (int64_t r : group) ++senders[grid.node_of(r)];
  }
  int64_t worst = 0;
  for (const auto& [node, n] : senders) worst = std::max(worst, n);
  return std::max(1.0, static_cast<double>(worst) /
                           static_cast<double>(cluster.nics_per_node));
}

double AlltoallTime(double volume, const RankGrid& grid,
                    const ClusterConfig& cluster) {
  if (grid.hp() == 1) return 0.0;
  if (AlltoallLinkClass(grid) == LinkClass::kIntraNvlink) {
    return cluster.alltoall_latency + volume / cluster.nvlink_bw;
  }
  return cluster.alltoall_latency +
         volume * AlltoallContention(grid, cluster) / cluster.nic_bw;
}

CostReport Objective(const ModelConfig& model, const ParallelConfig& par,
                     const ClusterConfig& cluster, const RankGrid& grid) {
  CostReport c;
  c.t_comp_fwd = CompTime(model, par, cluster, Phase::kForward);
  c.t_comp_bwd = CompTime(model, par, cluster, Phase::kBackward);
  c.size_kv = SizeKv(model, par);
  c.size_q = SizeQ(model, par);
  c.size_out = SizeOut(model, par);
  c.replicated_kv_heads = static_cast<double>(
      ReplicatedKvHeads(model.heads, model.kv_heads, par.hp));

  const RingTiming fwd = InnerRingTiming(model, par, cluster, grid, Phase::kForward);
  const RingTiming bwd = InnerRingTiming(model, par, cluster, grid, Phase::kBackward);
  c.t_p2p_inner_fwd = fwd.p2p_inner;
  c.t_p2p_outer_fwd = fwd.p2p_outer;
  c.t_p2p_inner_bwd = bwd.p2p_inner;
  c.t_p2p_outer_bwd = bwd.p2p_outer;
  c.t_inner_ring_fwd = fwd.inner_ring;
  c.t_inner_ring_bwd = bwd.inner_ring;
  c.outer_steps = static_cast<double>(par.outer_ring());

  c.alltoall_volume = AlltoallVolume(model, par);
  c.alltoall_link = AlltoallLinkClass(grid);
  for (Phase p : {Phase::kForward, Phase::kBackward}) {
    const AlltoallSplit v = AlltoallPhaseVolumes(model, par, p);
    c.t_seqalltoall += AlltoallTime(v.in, grid, cluster) +
                       AlltoallTime(v.out, grid, cluster);
  }
  c.alltoall_bytes = 2.0 * c.alltoall_volume;

  c.objective = c.t_seqalltoall +
                (c.t_inner_ring_fwd + c.t_inner_ring_bwd) * c.outer_steps;

  // Average bytes per GPU by link class over forward + backward.
  const double phase_bytes = c.size_kv * (1.0 + kBackwardP2pFactor);
  const double rings = static_cast<double>(par.outer_ring());
  const double inner_sends = rings * static_cast<double>(par.inner_ring - 1);
  const double outer_sends = rings - 1.0;
  double intra = 0, inter = 0;
  for (const Hop& h : InnerRingHops(grid, cluster)) {
    (h.link == LinkClass::kIntraNvlink ? intra : inter) += inner_sends * phase_bytes;
  }
  for (const Hop& h : OuterRingHops(grid, cluster)) {
    (h.link == LinkClass::kIntraNvlink ? intra : inter) += outer_sends * phase_bytes;
  }
  c.p2p_bytes_intra = intra / static_cast<double>(grid.size());
  c.p2p_bytes_inter = inter / static_cast<double>(grid.size());
  return c;
}

MemoryReport MemoryEstimate(const ModelConfig& model, const ParallelConfig& par,
                            CheckpointMode checkpoint, int64_t zero_shard_degree) {
  if (zero_shard_degree < 1 || zero_shard_degree > par.dp * par.sp()) {
    throw ConfigError("zero_shard_degree must lie in [1, d_dp * d_sp]");
  }
  const double sp = static_cast<double>(par.sp());
  const double s = static_cast<double>(model.seq_len);
  const double elem = static_cast<double>(model.elem_bytes);
  const double lse = static_cast<double>(model.lse_bytes);
  const double sd = s * static_cast<double>(model.hidden);
  const double sh = s * static_cast<double>(model.heads);

  MemoryReport m;
  m.activation_bytes_per_layer = elem * sd / sp;
  switch (checkpoint) {
    case CheckpointMode::kFull:
      m.checkpoint_extra_bytes_per_layer = 0;
      break;
    case CheckpointMode::kSelectivePlusPlus:
      m.checkpoint_extra_bytes_per_layer = (elem * sd + lse * sh) / sp;
      break;
    case CheckpointMode::kNone:
      m.checkpoint_extra_bytes_per_layer = (3.0 * elem * sd + lse * sh) / sp;
      break;
  }
  m.kv_buffer_bytes = SizeKv(model, par) * (par.inner_ring < par.cp ? 2.0 : 1.0);
  m.model_state_bytes = static_cast<double>(model.effective_param_count()) *
                        kModelStateBytesPerParam /
                        static_cast<double>(zero_shard_degree);
  m.total_bytes = static_cast<double>(model.layers) *
                      (m.activation_bytes_per_layer +
                       m.checkpoint_extra_bytes_per_layer) +
                  m.kv_buffer_bytes + m.model_state_bytes;
  return m;
}

double BubbleRate(int64_t pipeline_stages, int64_t micro_batches) {
  if (pipeline_stages <= 1) return 0.0;
  if (micro_batches <= 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(pipeline_stages - 1) /
         static_cast<double>(micro_batches);
}

ScalabilityReport Scalability(const ModelConfig& model, AttentionMode mode,
                              int64_t pipeline_stages, int64_t dp) {
  if (model.seq_len < 1 || model.global_batch < model.seq_len) {
    throw ConfigError("scalability requires B >= S >= 1");
  }
  if (pipeline_stages < 1 || dp < 1) {
    throw ConfigError("pipeline stages and d_dp must be >= 1");
  }
  ScalabilityReport r;
  r.mode = mode;
  r.max_dp = model.global_batch / model.seq_len;
  if (mode == AttentionMode::kHeadParallel) {
    r.max_sp = model.heads;
    r.max_gpus = *r.max_sp * r.max_dp;
  }
  r.pipeline_stages = pipeline_stages;
  r.dp = dp;
  r.micro_batches = model.global_batch / (model.seq_len * dp);
  r.bubble_rate = BubbleRate(pipeline_stages, r.micro_batches);
  return r;
}

namespace {

const char* LinkName(LinkClass l) {
  return l == LinkClass::kIntraNvlink ? "intra_nvlink" : "inter_nic";
}

}  // namespace

nlohmann::json ToJson(const CostReport& c) {
  return {
      {"t_comp_fwd", c.t_comp_fwd},
      {"t_comp_bwd", c.t_comp_bwd},
      {"size_kv", c.size_kv},
      {"size_q", c.size_q},
      {"size_out", c.size_out},
      {"replicated_kv_heads", c.replicated_kv_heads},
      {"t_p2p_inner_fwd", c.t_p2p_inner_fwd},
      {"t_p2p_outer_fwd", c.t_p2p_outer_fwd},
      {"t_p2p_inner_bwd", c.t_p2p_inner_bwd},
      {"t_p2p_outer_bwd", c.t_p2p_outer_bwd},
      {"t_inner_ring_fwd", c.t_inner_ring_fwd},
      {"t_inner_ring_bwd", c.t_inner_ring_bwd},
      {"outer_steps", c.outer_steps},
      {"alltoall_volume", c.alltoall_volume},
      {"alltoall_link", LinkName(c.alltoall_link)},
      {"t_seqalltoall", c.t_seqalltoall},
      {"objective", c.objective},
      {"bwd_p2p_factor", c.bwd_p2p_factor},
      {"volume",
       {{"p2p_bytes_intra", c.p2p_bytes_intra},
        {"p2p_bytes_inter", c.p2p_bytes_inter},
        {"alltoall_bytes", c.alltoall_bytes}}},
  };
}

nlohmann::json ToJson(const MemoryReport& m) {
  return {
      {"activation_bytes_per_layer", m.activation_bytes_per_layer},
      {"checkpoint_extra_bytes_per_layer", m.checkpoint_extra_bytes_per_layer},
      {"kv_buffer_bytes", m.kv_buffer_bytes},
      {"model_state_bytes", m.model_state_bytes},
      {"total_bytes", m.total_bytes},
  };
}

nlohmann::json ToJson(const ScalabilityReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode == AttentionMode::kHeadParallel ? "head_parallel" : "2d";
  j["max_sp"] = r.max_sp ? nlohmann::json(*r.max_sp) : nlohmann::json("unbounded");
  j["max_dp"] = r.max_dp;
  j["max_gpus"] =
      r.max_gpus ? nlohmann::json(*r.max_gpus) : nlohmann::json("unbounded");
  j["pipeline_stages"] = r.pipeline_stages;
  j["dp"] = r.dp;
  j["micro_batches"] = r.micro_batches;
  if (std::isinf(r.bubble_rate)) {
    j["bubble_rate"] = "infinite";
  } else {
    j["bubble_rate"] = r.bubble_rate;
  }
  return j;
}

}  // namespace hcp
