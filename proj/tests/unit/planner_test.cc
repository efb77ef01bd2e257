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

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include <gtest/gtest.h>

#include "hcp/planner.h"
#include "oracles.h"

namespace hcp {
namespace {

ModelConfig Model(int64_t h, int64_t kv) {
  ModelConfig m;
  m.seq_len = 131072;
  m.heads = h;
  m.kv_heads = kv;
  m.hidden = 4096;
  m.global_batch = 4 * 1024 * 1024;
  m.layers = 32;
  return m;
}

using Key = std::tuple<int64_t, int64_t, int64_t, int64_t>;

std::multiset<Key> Keys(const std::vector<ParallelConfig>& cs) {
  std::multiset<Key> out;
  for (const auto& c : cs) {
    out.insert({c.hp, c.cp, c.inner_ring, static_cast<int64_t>(c.placement)});
  }
  return out;
}

TEST(EnumerateTest, SingleGpu) {
  EXPECT_EQ(EnumerateConfigs(Model(32, 32), 1, {}).size(), 1u);
}

TEST(EnumerateTest, HeadBound) {
  std::set<int64_t> hps;
  for (const auto& c : EnumerateConfigs(Model(32, 8), 64, {})) hps.insert(c.hp);
  EXPECT_EQ(hps, (std::set<int64_t>{1, 2, 4, 8, 16, 32}));
}

TEST(EnumerateTest, CountMatchesHandEnumeration) {
  // 4 factorizations of 8, sum of divisor counts of d_cp 4+3+2+1, two
  // placements.
  auto configs = EnumerateConfigs(Model(32, 32), 8, {});
  EXPECT_EQ(configs.size(), 20u);
  for (int64_t sp : {1, 2, 4, 8, 16, 32, 64, 128}) {
    for (auto [h, kv] : {std::pair<int64_t, int64_t>{32, 8}, {32, 32}, {12, 4}}) {
      ModelConfig m = Model(h, kv);
      m.seq_len = 3 * 65536;
      m.hidden = h * 128;
      std::multiset<Key> want;
      for (const auto& t : oracle::EnumerateByHand(sp, h, m.seq_len)) {
        want.insert({t.hp, t.cp, t.w, t.placement});
      }
      auto got = EnumerateConfigs(m, sp, {});
      EXPECT_EQ(Keys(got), want) << "sp=" << sp << " H=" << h;
      for (const auto& c : got) EXPECT_TRUE(Validate(m, c, {}).ok());
    }
  }
}

TEST(EnumerateTest, NothingWhenSequenceIndivisible) {
  ModelConfig m = Model(32, 32);
  m.seq_len = 1000;
  m.global_batch = 1000;
  EXPECT_TRUE(EnumerateConfigs(m, 16, {}).empty());
  EXPECT_THROW(Plan(m, 16, {}, {}), ConfigError);
}

PlanEntry Entry(int64_t hp, int64_t w, Placement pl, double objective) {
  PlanEntry e;
  e.config = {1, hp, 8, w, pl};
  e.cost.objective = objective;
  return e;
}

TEST(RankTest, SingleAndEmpty) {
  auto one = Rank({Entry(2, 2, Placement::kHeadFirst, 1.0)}, RankKey::kObjective);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].config.hp, 2);
  EXPECT_THROW(Rank({}, RankKey::kObjective), std::invalid_argument);
  EXPECT_THROW(Rank({Entry(1, 1, Placement::kHeadFirst, 1.0)}, RankKey::kSimMakespan),
               std::invalid_argument);
}

TEST(RankTest, TieBreaking) {
  std::vector<PlanEntry> in = {
      Entry(4, 1, Placement::kHeadFirst, 1.0), Entry(2, 4, Placement::kContextFirst, 1.0),
      Entry(2, 4, Placement::kHeadFirst, 1.0), Entry(2, 2, Placement::kContextFirst, 1.0),
      Entry(8, 8, Placement::kHeadFirst, 0.5)};
  auto out = Rank(in, RankKey::kObjective);
  EXPECT_EQ(out[0].config.hp, 8);
  EXPECT_EQ(out[1].config.inner_ring, 2);
  EXPECT_EQ(out[2].config.placement, Placement::kHeadFirst);
  EXPECT_EQ(out[3].config.placement, Placement::kContextFirst);
  EXPECT_EQ(out[4].config.hp, 4);
  // Input order does not matter.
  std::reverse(in.begin(), in.end());
  auto again = Rank(in, RankKey::kObjective);
  for (size_t i = 0; i < out.size(); ++i) EXPECT_EQ(again[i].config, out[i].config);
}

TEST(PlanTest, GqaPrefersModerateHeadParallelism) {
  auto plan = Plan(Model(32, 8), 64, {}, {});
  const int64_t hp = plan.front().config.hp;
  EXPECT_TRUE(hp == 4 || hp == 8 || hp == 16) << "top d_hp=" << hp;
  for (size_t i = 1; i < plan.size(); ++i) {
    EXPECT_LE(plan[i - 1].cost.objective, plan[i].cost.objective);
  }
}

TEST(PlanTest, InnerRingMatchesNicCount) {
  auto plan = Plan(Model(32, 32), 64, {}, {});
  auto it = std::find_if(plan.begin(), plan.end(),
                         [](const PlanEntry& e) { return e.config.cp == 16; });
  ASSERT_NE(it, plan.end());
  EXPECT_EQ(it->config.inner_ring, 4);
  EXPECT_EQ(it->config.placement, Placement::kContextFirst);
}

TEST(PlanTest, SimulatedKey) {
  PlanOptions opt;
  opt.key = RankKey::kSimMakespan;
  auto plan = Plan(Model(32, 8), 16, {}, opt);
  for (size_t i = 0; i < plan.size(); ++i) {
    ASSERT_TRUE(plan[i].makespan.has_value());
    if (i) {
      EXPECT_LE(*plan[i - 1].makespan, *plan[i].makespan);
    }
  }
}

TEST(PlanTest, MemoryCeiling) {
  ClusterConfig c;
  auto all = Plan(Model(32, 32), 8, c, {});
  double lo = INFINITY, hi = 0;
  for (const auto& e : all) {
    lo = std::min(lo, e.memory.total_bytes);
    hi = std::max(hi, e.memory.total_bytes);
  }
  ASSERT_LT(lo, hi);
  c.gpu_mem_bytes = (lo + hi) / 2;
  auto some = Plan(Model(32, 32), 8, c, {});
  EXPECT_LT(some.size(), all.size());
  for (const auto& e : some) EXPECT_LE(e.memory.total_bytes, *c.gpu_mem_bytes);
  c.gpu_mem_bytes = lo / 2;
  EXPECT_THROW(Plan(Model(32, 32), 8, c, {}), ConfigError);
}

TEST(PlanTest, FewerNicsNeverHelp) {
  ModelConfig m = Model(32, 32);
  ClusterConfig four, two;
  two.nics_per_node = 2;
  for (const auto& par : EnumerateConfigs(m, 64, four)) {
    EXPECT_GE(Score(m, par, two, {}).cost.objective, Score(m, par, four, {}).cost.objective);
  }
}

TEST(PlanTableTest, CsvAndJson) {
  PlanOptions opt;
  opt.simulate = true;
  auto plan = Plan(Model(32, 8), 4, {}, opt);
  std::istringstream csv(PlanCsv(plan));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "d_hp,d_cp,w,placement,objective_ms,makespan_ms,mem_GB,rank");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
  }
  EXPECT_EQ(rows, static_cast<int>(plan.size()));
  auto j = PlanJson(plan);
  ASSERT_EQ(j.size(), plan.size());
  EXPECT_EQ(j[0]["rank"], 1);
  for (const char* k : {"d_hp", "d_cp", "w", "placement", "objective_ms", "makespan_ms",
                        "mem_GB"}) {
    EXPECT_TRUE(j[0].contains(k)) << k;
  }
}

}  // namespace
}  // namespace hcp
