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

#include "hcp/config_io.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hcp {

namespace {

std::string LineContext(std::string_view text, size_t byte, std::string_view source) {
  byte = std::min(byte, text.size());
  // nlohmann reports the position one past the offending character.
  const size_t at = byte > 0 ? byte - 1 : 0;
  size_t line = 1;
  size_t line_start = 0;
  for (size_t i = 0; i < at && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  size_t line_end = text.find('\n', line_start);
  if (line_end == std::string_view::npos) line_end = text.size();
  const size_t col = at - line_start + 1;
  std::ostringstream os;
  os << source << ':' << line << ':' << col << ": ";
  std::string excerpt(text.substr(line_start, line_end - line_start));
  os << "\n    " << excerpt << "\n    " << std::string(col > 0 ? col - 1 : 0, ' ') << '^';
  return os.str();
}

void CheckKeys(const nlohmann::json& obj, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

void Get(const nlohmann::json& obj, const std::string& where, const char* key,
         int64_t& dst, bool required = false) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ConfigError(where + ": missing required key '" + key + "'");
    return;
  }
  if (!it->is_number_integer()) {
    throw ConfigError(where + "." + key + ": expected an integer");
  }
  dst = it->get<int64_t>();
}

void Get(const nlohmann::json& obj, const std::string& where, const char* key,
         double& dst) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  dst = it->get<double>();
}

void Get(const nlohmann::json& obj, const std::string& where, const char* key,
         std::optional<double>& dst) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  dst = it->get<double>();
}

ModelConfig ParseModel(const nlohmann::json& j) {
  CheckKeys(j, "model",
            {"seq_len", "heads", "kv_heads", "hidden", "layers", "global_batch",
             "elem_bytes", "lse_bytes", "param_count"});
  ModelConfig m;
  Get(j, "model", "seq_len", m.seq_len, true);
  Get(j, "model", "heads", m.heads, true);
  Get(j, "model", "hidden", m.hidden, true);
  m.kv_heads = m.heads;
  Get(j, "model", "kv_heads", m.kv_heads);
  m.global_batch = m.seq_len;
  Get(j, "model", "global_batch", m.global_batch);
  Get(j, "model", "layers", m.layers);
  Get(j, "model", "elem_bytes", m.elem_bytes);
  Get(j, "model", "lse_bytes", m.lse_bytes);
  Get(j, "model", "param_count", m.param_count);
  return m;
}

ParallelConfig ParseParallel(const nlohmann::json& j) {
  CheckKeys(j, "parallel", {"dp", "hp", "cp", "inner_ring", "placement"});
  ParallelConfig p;
  Get(j, "parallel", "dp", p.dp);
  Get(j, "parallel", "hp", p.hp);
  Get(j, "parallel", "cp", p.cp);
  p.inner_ring = p.cp;
  Get(j, "parallel", "inner_ring", p.inner_ring);
  if (auto it = j.find("placement"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("parallel.placement: expected a string");
    auto pl = ParsePlacement(it->get<std::string>());
    if (!pl) {
      throw ConfigError("parallel.placement: expected head_first or context_first");
    }
    p.placement = *pl;
  }
  return p;
}

ClusterConfig ParseCluster(const nlohmann::json& j) {
  CheckKeys(j, "cluster",
            {"gpus_per_node", "nics_per_node", "nic_bw", "nvlink_bw",
             "p2p_latency_intra", "p2p_latency_inter", "alltoall_latency",
             "peak_flops", "efficiency", "alpha_fwd", "gpu_mem_bytes"});
  ClusterConfig c;
  Get(j, "cluster", "gpus_per_node", c.gpus_per_node);
  Get(j, "cluster", "nics_per_node", c.nics_per_node);
  Get(j, "cluster", "nic_bw", c.nic_bw);
  Get(j, "cluster", "nvlink_bw", c.nvlink_bw);
  Get(j, "cluster", "p2p_latency_intra", c.p2p_latency_intra);
  Get(j, "cluster", "p2p_latency_inter", c.p2p_latency_inter);
  Get(j, "cluster", "alltoall_latency", c.alltoall_latency);
  Get(j, "cluster", "peak_flops", c.peak_flops);
  Get(j, "cluster", "efficiency", c.efficiency);
  Get(j, "cluster", "alpha_fwd", c.alpha_fwd);
  Get(j, "cluster", "gpu_mem_bytes", c.gpu_mem_bytes);
  return c;
}

}  // namespace

ConfigFile ParseConfig(std::string_view text, std::string_view source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(LineContext(text, e.byte, source) + "\n" + e.what());
  }
  const std::string src(source);
  try {
    CheckKeys(j, src, {"model", "parallel", "cluster"});
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (allowed: model, parallel, cluster)");
  }
  ConfigFile cfg;
  if (j.contains("model")) cfg.model = ParseModel(j["model"]);
  if (j.contains("parallel")) cfg.parallel = ParseParallel(j["parallel"]);
  if (j.contains("cluster")) cfg.cluster = ParseCluster(j["cluster"]);
  return cfg;
}

ConfigFile LoadConfigFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ParseConfig(ss.str(), path);
}

nlohmann::json ToJson(const ModelConfig& m) {
  return {{"seq_len", m.seq_len},       {"heads", m.heads},
          {"kv_heads", m.kv_heads},     {"hidden", m.hidden},
          {"layers", m.layers},         {"global_batch", m.global_batch},
          {"elem_bytes", m.elem_bytes}, {"lse_bytes", m.lse_bytes},
          {"param_count", m.param_count}};
}

nlohmann::json ToJson(const ParallelConfig& p) {
  return {{"dp", p.dp},
          {"hp", p.hp},
          {"cp", p.cp},
          {"inner_ring", p.inner_ring},
          {"placement", PlacementName(p.placement)}};
}

nlohmann::json ToJson(const ClusterConfig& c) {
  nlohmann::json j = {{"gpus_per_node", c.gpus_per_node},
                      {"nics_per_node", c.nics_per_node},
                      {"nic_bw", c.nic_bw},
                      {"nvlink_bw", c.nvlink_bw},
                      {"p2p_latency_intra", c.p2p_latency_intra},
                      {"p2p_latency_inter", c.p2p_latency_inter},
                      {"alltoall_latency", c.alltoall_latency},
                      {"peak_flops", c.peak_flops},
                      {"efficiency", c.efficiency}};
  if (c.alpha_fwd) j["alpha_fwd"] = *c.alpha_fwd;
  if (c.gpu_mem_bytes) j["gpu_mem_bytes"] = *c.gpu_mem_bytes;
  return j;
}

nlohmann::json ToJson(const ConfigFile& cfg) {
  nlohmann::json j;
  if (cfg.model) j["model"] = ToJson(*cfg.model);
  if (cfg.parallel) j["parallel"] = ToJson(*cfg.parallel);
  j["cluster"] = ToJson(cfg.cluster);
  return j;
}

}  // namespace hcp
