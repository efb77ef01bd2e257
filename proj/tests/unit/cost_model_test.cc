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

#include <cmath>

#include <gtest/gtest.h>

#include "hcp/cost_model.h"

namespace hcp {
namespace {

ModelConfig Model(int64_t s, int64_t h, int64_t kv, int64_t d = 4096) {
  ModelConfig m;
  m.seq_len = s;
  m.heads = h;
  m.kv_heads = kv;
  m.hidden = d;
  m.global_batch = 4 * 1024 * 1024;
  m.layers = 32;
  return m;
}

constexpr int64_t k128K = 131072;

TEST(SizeTest, KvChunkBytes) {
  ParallelConfig par{1, 1, 8, 8};
  EXPECT_EQ(SizeKv(Model(k128K, 32, 8), par), 67108864.0);
  EXPECT_EQ(SizeKv(Model(k128K, 32, 32), par), 268435456.0);
}

TEST(SizeTest, KvChunkScalesWithElementSize) {
  ModelConfig m = Model(k128K, 32, 8);
  m.elem_bytes = 4;
  EXPECT_EQ(SizeKv(m, {1, 1, 8, 8}), 2 * 67108864.0);
}

TEST(SizeTest, GqaMatchesMhaOnlyAtFullReplication) {
  for (int64_t hp : {1, 2, 4, 8, 16, 32}) {
    ParallelConfig par{1, hp, 64 / hp, 1};
    const double gqa = SizeKv(Model(k128K, 32, 8), par);
    const double mha = SizeKv(Model(k128K, 32, 32), par);
    if (hp == 32) {
      EXPECT_EQ(gqa, mha);
    } else {
      EXPECT_LT(gqa, mha);
    }
  }
}

TEST(SizeTest, KvChunkIgnoresHpCpSplitBeyondHp) {
  // Same d_sp and d_hp; ring shape and placement do not enter.
  EXPECT_EQ(SizeKv(Model(k128K, 32, 8), {1, 4, 16, 4, Placement::kHeadFirst}),
            SizeKv(Model(k128K, 32, 8), {1, 4, 16, 1, Placement::kContextFirst}));
  // Below H_kv, d_hp does not matter at fixed d_sp.
  EXPECT_EQ(SizeKv(Model(k128K, 32, 8), {1, 2, 32, 1}),
            SizeKv(Model(k128K, 32, 8), {1, 8, 8, 1}));
}

TEST(CompTimeTest, Scaling) {
  ClusterConfig c;
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 8, 8, 4};
  const double fwd = CompTime(m, par, c, Phase::kForward);
  EXPECT_EQ(CompTime(m, par, c, Phase::kBackward) / fwd, 3.0);
  EXPECT_DOUBLE_EQ(fwd, 2.0 / (312e12 * 0.5) * double(k128K) * k128K * 4096 / (8 * 64));
  ModelConfig m2 = m;
  m2.seq_len *= 2;
  EXPECT_DOUBLE_EQ(CompTime(m2, par, c, Phase::kForward), 4 * fwd);
  EXPECT_DOUBLE_EQ(CompTime(m, {1, 16, 4, 4}, c, Phase::kForward), 2 * fwd);
  c.alpha_fwd = 1e-12;
  EXPECT_DOUBLE_EQ(CompTime(m, par, c, Phase::kForward),
                   1e-12 * double(k128K) * k128K * 4096 / 512);
}

TEST(P2pTimeTest, LatencyAndBandwidth) {
  ClusterConfig c;
  EXPECT_EQ(P2pTime(0, LinkClass::kInterNic, 1, c), c.p2p_latency_inter);
  EXPECT_EQ(P2pTime(0, LinkClass::kIntraNvlink, 3, c), c.p2p_latency_intra);
  EXPECT_NEAR(P2pTime(67108864, LinkClass::kInterNic, 1, c) - c.p2p_latency_inter,
              2.68435456e-3, 1e-15);
  const double one = P2pTime(1e8, LinkClass::kInterNic, 1, c) - c.p2p_latency_inter;
  const double two = P2pTime(1e8, LinkClass::kInterNic, 2, c) - c.p2p_latency_inter;
  EXPECT_DOUBLE_EQ(two, 2 * one);
  EXPECT_DOUBLE_EQ(P2pTime(3e8, LinkClass::kIntraNvlink, 1, c),
                   c.p2p_latency_intra + 1e-3);
}

TEST(HopTest, HeadFirstRingCrossesEveryNode) {
  // rank (i, j) = 8j + i, so node = j: every inner hop leaves its node and
  // each node sends and receives 8 flows over 4 NICs.
  ClusterConfig c;
  RankGrid g({1, 8, 8, 8, Placement::kHeadFirst}, 8);
  auto hops = InnerRingHops(g, c);
  ASSERT_EQ(hops.size(), 64u);
  for (const Hop& h : hops) {
    EXPECT_EQ(h.link, LinkClass::kInterNic);
    EXPECT_EQ(h.contention, 2.0);
  }
  EXPECT_TRUE(OuterRingHops(g, c).empty());
}

TEST(HopTest, ContextFirstDoubleRing) {
  // d_cp = 16 over two nodes per CP group; inner rings of 4 stay on a node,
  // 4 outer flows per node cross on 4 NICs.
  ClusterConfig c;
  RankGrid g({1, 4, 16, 4, Placement::kContextFirst}, 8);
  for (const Hop& h : InnerRingHops(g, c)) {
    EXPECT_EQ(h.link, LinkClass::kIntraNvlink);
    EXPECT_EQ(h.contention, 1.0);
  }
  int inter = 0;
  for (const Hop& h : OuterRingHops(g, c)) {
    if (h.link == LinkClass::kInterNic) {
      ++inter;
      EXPECT_EQ(h.contention, 1.0);
    }
  }
  EXPECT_EQ(inter, 4 * 2 * 4);  // 4 CP groups, 2 crossings, w flows each
  // w = 8 puts 8 flows on 4 NICs.
  RankGrid g8({1, 4, 16, 8, Placement::kContextFirst}, 8);
  for (const Hop& h : OuterRingHops(g8, c)) {
    EXPECT_EQ(h.link, LinkClass::kInterNic);
    EXPECT_EQ(h.contention, 2.0);
  }
}

TEST(InnerRingTest, SingleSlotIsB) {
  ClusterConfig c;
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 4, 16, 1, Placement::kContextFirst};
  RankGrid g(par, 8);
  auto t = InnerRingTiming(m, par, c, g, Phase::kForward);
  EXPECT_EQ(t.inner_ring, t.b);
  EXPECT_EQ(t.p2p_inner, 0.0);
}

TEST(InnerRingTest, ComputeBound) {
  ClusterConfig c;
  c.alpha_fwd = 1e-9;
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 4, 16, 4, Placement::kContextFirst};
  RankGrid g(par, 8);
  auto t = InnerRingTiming(m, par, c, g, Phase::kBackward);
  EXPECT_DOUBLE_EQ(t.inner_ring, 4 * CompTime(m, par, c, Phase::kBackward));
}

TEST(InnerRingTest, FormulaAndBackwardBytes) {
  ClusterConfig c;
  c.alpha_fwd = 1e-18;  // communication bound
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 4, 16, 4, Placement::kContextFirst};
  RankGrid g(par, 8);
  const double kv = SizeKv(m, par);
  auto f = InnerRingTiming(m, par, c, g, Phase::kForward);
  EXPECT_DOUBLE_EQ(f.p2p_inner, c.p2p_latency_intra + kv / c.nvlink_bw);
  EXPECT_DOUBLE_EQ(f.p2p_outer, c.p2p_latency_inter + kv / c.nic_bw);
  EXPECT_DOUBLE_EQ(f.inner_ring, f.p2p_inner * 3 + f.p2p_outer);
  auto b = InnerRingTiming(m, par, c, g, Phase::kBackward);
  EXPECT_DOUBLE_EQ(b.p2p_outer, c.p2p_latency_inter + 2 * kv / c.nic_bw);
}

TEST(InnerRingTest, WrapHopWhenSingleRing) {
  // w = d_cp = 16 ContextFirst: the wrap 15 -> 0 crosses nodes.
  ClusterConfig c;
  c.alpha_fwd = 1e-18;
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 4, 16, 16, Placement::kContextFirst};
  RankGrid g(par, 8);
  auto t = InnerRingTiming(m, par, c, g, Phase::kForward);
  EXPECT_DOUBLE_EQ(t.p2p_outer, c.p2p_latency_inter + SizeKv(m, par) / c.nic_bw);
  // An intra-node single ring has an intra wrap hop.
  ParallelConfig small{1, 4, 8, 8, Placement::kContextFirst};
  RankGrid gs(small, 8);
  auto ts = InnerRingTiming(m, small, c, gs, Phase::kForward);
  EXPECT_DOUBLE_EQ(ts.p2p_outer, ts.p2p_inner);
}

TEST(AlltoallTest, Volume) {
  ModelConfig m = Model(k128K, 32, 32);
  EXPECT_EQ(AlltoallVolume(m, {1, 1, 64, 1}), 0.0);
  const double sd = double(k128K) * 4096;
  EXPECT_DOUBLE_EQ(AlltoallVolume(m, {1, 2, 32, 1}), 4 * sd / 64);
  ModelConfig gqa = Model(k128K, 32, 8);
  double prev = -1;
  for (int64_t hp : {1, 2, 4, 8, 16, 32}) {
    const double v = AlltoallVolume(gqa, {1, hp, 64 / hp, 1});
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(AlltoallTest, PhaseSplitsSumToVolume) {
  ModelConfig m = Model(k128K, 32, 8);
  ParallelConfig par{1, 16, 4, 1};
  for (Phase p : {Phase::kForward, Phase::kBackward}) {
    auto s = AlltoallPhaseVolumes(m, par, p);
    EXPECT_DOUBLE_EQ(s.in + s.out, AlltoallVolume(m, par));
  }
}

TEST(AlltoallTest, TimeByPlacement) {
  ClusterConfig c;
  RankGrid hf({1, 8, 8, 1, Placement::kHeadFirst}, 8);
  RankGrid cf({1, 8, 8, 1, Placement::kContextFirst}, 8);
  EXPECT_EQ(AlltoallLinkClass(hf), LinkClass::kIntraNvlink);
  EXPECT_EQ(AlltoallLinkClass(cf), LinkClass::kInterNic);
  EXPECT_EQ(AlltoallTime(0, hf, c), c.alltoall_latency);
  EXPECT_DOUBLE_EQ(AlltoallTime(3e8, hf, c), c.alltoall_latency + 1e-3);
  // Every GPU of a node sends: 8 senders on 4 NICs.
  EXPECT_EQ(AlltoallContention(cf, c), 2.0);
  EXPECT_DOUBLE_EQ(AlltoallTime(25e6, cf, c), c.alltoall_latency + 2e-3);
  RankGrid single({1, 1, 64, 1, Placement::kContextFirst}, 8);
  EXPECT_EQ(AlltoallTime(1e9, single, c), 0.0);
}

TEST(AlltoallTest, HeadFirstSpanningGroups) {
  ClusterConfig c;
  RankGrid g({1, 16, 4, 1, Placement::kHeadFirst}, 8);
  EXPECT_EQ(AlltoallLinkClass(g), LinkClass::kInterNic);
  EXPECT_EQ(AlltoallContention(g, c), 2.0);
  c.nics_per_node = 8;
  EXPECT_EQ(AlltoallContention(g, c), 1.0);
}

TEST(ObjectiveTest, Decomposition) {
  ClusterConfig c;
  for (int64_t hp : {1, 2, 4, 8}) {
    for (int64_t w : {1, 2, 4, 8}) {
      for (Placement pl : {Placement::kHeadFirst, Placement::kContextFirst}) {
        ParallelConfig par{1, hp, 64 / hp, std::min<int64_t>(w, 64 / hp), pl};
        RankGrid g(par, 8);
        auto r = Objective(Model(k128K, 32, 8), par, c, g);
        EXPECT_DOUBLE_EQ(r.objective, r.t_seqalltoall + (r.t_inner_ring_fwd +
                                                         r.t_inner_ring_bwd) *
                                                            (par.cp / par.inner_ring));
        EXPECT_EQ(r.t_comp_bwd / r.t_comp_fwd, 3.0);
        EXPECT_EQ(r.bwd_p2p_factor, 2.0);
        if (hp == 1) {
          EXPECT_EQ(r.t_seqalltoall, 0.0);
        }
        for (double x : {r.t_p2p_inner_fwd, r.t_p2p_outer_fwd, r.p2p_bytes_intra,
                         r.p2p_bytes_inter, r.alltoall_bytes}) {
          EXPECT_GE(x, 0.0);
        }
      }
    }
  }
}

TEST(ObjectiveTest, ComputeDominatedLimit) {
  ClusterConfig c;
  c.alpha_fwd = 1e-9;
  ModelConfig m = Model(k128K, 32, 32);
  ParallelConfig par{1, 8, 8, 4, Placement::kHeadFirst};
  RankGrid g(par, 8);
  auto r = Objective(m, par, c, g);
  EXPECT_DOUBLE_EQ(r.objective, r.t_seqalltoall + (r.t_comp_fwd + r.t_comp_bwd) * 8);
}

TEST(ObjectiveTest, FasterNetworkNeverHurts) {
  ModelConfig m = Model(k128K, 32, 8);
  for (int64_t hp : {1, 2, 4, 8, 16, 32}) {
    for (Placement pl : {Placement::kHeadFirst, Placement::kContextFirst}) {
      ParallelConfig par{1, hp, 64 / hp, 1, pl};
      RankGrid g(par, 8);
      ClusterConfig slow, fast;
      fast.nic_bw *= 2;
      EXPECT_LE(Objective(m, par, fast, g).objective, Objective(m, par, slow, g).objective);
      ClusterConfig more_nics;
      more_nics.nics_per_node = 8;
      EXPECT_LE(Objective(m, par, more_nics, g).objective,
                Objective(m, par, slow, g).objective);
    }
  }
}

TEST(ObjectiveTest, TrendDirections) {
  ClusterConfig c;
  ModelConfig mha = Model(k128K, 32, 32);
  auto obj = [&](ParallelConfig par) {
    return Objective(mha, par, c, RankGrid(par, c.gpus_per_node)).objective;
  };
  EXPECT_LT(obj({1, 8, 8, 8, Placement::kHeadFirst}), obj({1, 1, 64, 64}));
  EXPECT_LE(obj({1, 4, 16, 4, Placement::kContextFirst}),
            obj({1, 4, 16, 1, Placement::kContextFirst}));
}

TEST(MemoryTest, CheckpointModes) {
  ModelConfig m = Model(k128K, 32, 32);
  m.param_count = 7'000'000'000;
  ParallelConfig par{1, 8, 8, 4};
  const double sd = double(k128K) * 4096, sh = double(k128K) * 32;
  auto full = MemoryEstimate(m, par, CheckpointMode::kFull, 1);
  EXPECT_EQ(full.activation_bytes_per_layer, 2 * sd / 64);
  EXPECT_EQ(full.checkpoint_extra_bytes_per_layer, 0.0);
  auto scpp = MemoryEstimate(m, par, CheckpointMode::kSelectivePlusPlus, 1);
  EXPECT_EQ(scpp.checkpoint_extra_bytes_per_layer, (2 * sd + 4 * sh) / 64);
  auto none = MemoryEstimate(m, par, CheckpointMode::kNone, 1);
  EXPECT_EQ(none.checkpoint_extra_bytes_per_layer, (6 * sd + 4 * sh) / 64);
  EXPECT_EQ(full.kv_buffer_bytes, 2 * SizeKv(m, par));
  EXPECT_EQ(full.model_state_bytes, 7e9 * 16);
  EXPECT_DOUBLE_EQ(full.total_bytes, 32 * full.activation_bytes_per_layer +
                                         full.kv_buffer_bytes + full.model_state_bytes);
}

TEST(MemoryTest, BuffersAndSharding) {
  ModelConfig m = Model(k128K, 32, 32);
  auto single = MemoryEstimate(m, {1, 8, 8, 8}, CheckpointMode::kFull, 1);
  EXPECT_EQ(single.kv_buffer_bytes, SizeKv(m, {1, 8, 8, 8}));
  auto sharded = MemoryEstimate(m, {2, 8, 8, 8}, CheckpointMode::kFull, 128);
  EXPECT_DOUBLE_EQ(sharded.model_state_bytes, single.model_state_bytes / 128);
  EXPECT_THROW(MemoryEstimate(m, {1, 8, 8, 8}, CheckpointMode::kFull, 65), ConfigError);
  EXPECT_THROW(MemoryEstimate(m, {1, 8, 8, 8}, CheckpointMode::kFull, 0), ConfigError);
}

TEST(MemoryTest, ActivationsShrinkWithSp) {
  ModelConfig m = Model(k128K, 32, 32);
  double prev = INFINITY;
  for (int64_t sp : {1, 2, 4, 8, 16, 32, 64}) {
    auto r = MemoryEstimate(m, {1, 1, sp, sp}, CheckpointMode::kSelectivePlusPlus, 1);
    EXPECT_LE(r.activation_bytes_per_layer + r.checkpoint_extra_bytes_per_layer, prev);
    prev = r.activation_bytes_per_layer + r.checkpoint_extra_bytes_per_layer;
  }
}

TEST(ScalabilityTest, Examples) {
  ModelConfig m = Model(1024 * 1024, 32, 32);
  auto u = Scalability(m, AttentionMode::kHeadParallel);
  EXPECT_EQ(u.max_sp, 32);
  EXPECT_EQ(u.max_dp, 4);
  EXPECT_EQ(u.max_gpus, 128);
  ModelConfig s128 = Model(k128K, 32, 32);
  EXPECT_EQ(Scalability(s128, AttentionMode::kHeadParallel).max_gpus, 1024);
  auto twod = Scalability(m, AttentionMode::kTwoD);
  EXPECT_FALSE(twod.max_sp.has_value());
  EXPECT_FALSE(twod.max_gpus.has_value());
  EXPECT_EQ(ToJson(twod)["max_sp"], "unbounded");
}

TEST(ScalabilityTest, BubbleRate) {
  EXPECT_EQ(BubbleRate(1, 4), 0.0);
  EXPECT_EQ(BubbleRate(4, 4), 0.75);
  EXPECT_EQ(BubbleRate(9, 4), 2.0);
  EXPECT_TRUE(std::isinf(BubbleRate(2, 0)));
  auto r = Scalability(Model(1024 * 1024, 32, 32), AttentionMode::kTwoD, 4, 2);
  EXPECT_EQ(r.micro_batches, 2);
  EXPECT_EQ(r.bubble_rate, 1.5);
  ModelConfig bad = Model(1024, 32, 32);
  bad.global_batch = 512;
  EXPECT_THROW(Scalability(bad, AttentionMode::kTwoD), ConfigError);
}

TEST(ReportJsonTest, StableFieldNames) {
  ClusterConfig c;
  ParallelConfig par{1, 8, 8, 4};
  auto j = ToJson(Objective(Model(k128K, 32, 8), par, c, RankGrid(par, 8)));
  for (const char* k : {"t_comp_fwd", "t_comp_bwd", "size_kv", "size_q", "size_out",
                        "t_p2p_inner_fwd", "t_p2p_outer_fwd", "t_inner_ring_fwd",
                        "t_inner_ring_bwd", "t_seqalltoall", "objective", "volume"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  auto mj = ToJson(MemoryEstimate(Model(k128K, 32, 8), par, CheckpointMode::kFull, 1));
  EXPECT_TRUE(mj.contains("total_bytes"));
}

}  // namespace
}  // namespace hcp
