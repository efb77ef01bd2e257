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

#ifndef HCP_CONFIG_IO_H_
#define HCP_CONFIG_IO_H_

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hcp/config.h"

namespace hcp {

// Contents of a JSON configuration file. Each of the three sections may be
// omitted; a missing cluster section means the defaults.
struct ConfigFile {
  std::optional<ModelConfig> model;
  std::optional<ParallelConfig> parallel;
  ClusterConfig cluster;
};

// Parses configuration text. Unknown keys, wrong value types and malformed
// JSON raise ConfigError; syntax errors name the line and column and quote
// the offending line. `source` labels messages (usually the file path).
ConfigFile ParseConfig(std::string_view text, std::string_view source = "<config>");
ConfigFile LoadConfigFile(const std::string& path);

nlohmann::json ToJson(const ModelConfig& model);
nlohmann::json ToJson(const ParallelConfig& par);
nlohmann::json ToJson(const ClusterConfig& cluster);
nlohmann::json ToJson(const ConfigFile& config);

}  // namespace hcp

#endif  // HCP_CONFIG_IO_H_
