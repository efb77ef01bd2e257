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

#include <gtest/gtest.h>

#include "hcp/config_io.h"

namespace hcp {
namespace {

constexpr const char* kFull = R"({
  "model": {"seq_len": 131072, "heads": 32, "kv_heads": 8, "hidden": 4096,
            "global_batch": 4194304, "layers": 32},
  "parallel": {"hp": 8, "cp": 8, "inner_ring": 4, "placement": "context_first"},
  "cluster": {"nics_per_node": 4, "alpha_fwd": 1e-14}
})";

TEST(ConfigIoTest, ParsesAllSections) {
  ConfigFile c = ParseConfig(kFull);
  ASSERT_TRUE(c.model && c.parallel);
  EXPECT_EQ(c.model->kv_heads, 8);
  EXPECT_EQ(c.model->layers, 32);
  EXPECT_EQ(c.parallel->inner_ring, 4);
  EXPECT_EQ(c.parallel->placement, Placement::kContextFirst);
  EXPECT_EQ(c.cluster.alpha_fwd, 1e-14);
  EXPECT_EQ(c.cluster.gpus_per_node, 8);
}

TEST(ConfigIoTest, Defaults) {
  ConfigFile c = ParseConfig(R"({"model": {"seq_len": 64, "heads": 4, "hidden": 16},
                                 "parallel": {"cp": 4}})");
  EXPECT_EQ(c.model->kv_heads, 4);
  EXPECT_EQ(c.model->global_batch, 64);
  EXPECT_EQ(c.parallel->inner_ring, 4);
  EXPECT_EQ(c.parallel->hp, 1);
  EXPECT_EQ(c.parallel->placement, Placement::kHeadFirst);
}

TEST(ConfigIoTest, RoundTrip) {
  ConfigFile c = ParseConfig(kFull);
  ConfigFile back = ParseConfig(ToJson(c).dump());
  EXPECT_EQ(*back.model, *c.model);
  EXPECT_EQ(*back.parallel, *c.parallel);
  EXPECT_EQ(back.cluster, c.cluster);
}

TEST(ConfigIoTest, RejectsUnknownKeys) {
  EXPECT_THROW(ParseConfig(R"({"modle": {}})"), ConfigError);
  EXPECT_THROW(ParseConfig(R"({"model": {"seq_len": 8, "heads": 1, "hidden": 4, "x": 1}})"),
               ConfigError);
  EXPECT_THROW(ParseConfig(R"({"cluster": {"nic_bandwidth": 1}})"), ConfigError);
}

TEST(ConfigIoTest, RejectsWrongTypes) {
  EXPECT_THROW(ParseConfig(R"({"parallel": {"hp": "two"}})"), ConfigError);
  EXPECT_THROW(ParseConfig(R"({"parallel": {"hp": 2.5}})"), ConfigError);
  EXPECT_THROW(ParseConfig(R"({"parallel": {"placement": "diagonal"}})"), ConfigError);
  EXPECT_THROW(ParseConfig(R"({"model": {"heads": 4, "hidden": 16}})"), ConfigError);
}

TEST(ConfigIoTest, SyntaxErrorNamesLine) {
  const std::string text = "{\n  \"model\": {\n    \"seq_len\": 64,,\n  }\n}\n";
  try {
    ParseConfig(text, "bad.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.json:3:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("\"seq_len\": 64,,"), std::string::npos) << msg;
  }
}

TEST(ConfigIoTest, MissingFile) {
  EXPECT_THROW(LoadConfigFile("/nonexistent/hcp.json"), ConfigError);
}

}  // namespace
}  // namespace hcp
