// Copyright 2026 The provtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROVTREE_TOOLS_CONFIG_H_
#define PROVTREE_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "provtree/consistency.h"
#include "provtree/evalgen.h"
#include "provtree/sidecar.h"
#include "provtree/versiontree.h"

namespace provtree::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kDot, kDocument, kCsv };
std::string_view to_string(OutputFormat f);
std::optional<OutputFormat> parse_output_format(std::string_view s);

struct CliConfig {
  ConsistencyTolerances tolerances;
  HeuristicParams heuristic;
  std::size_t n_max = 8;
  int text_dims = 64;
  double missing_group_penalty = 1.0;
  OutputFormat format = OutputFormat::kDocument;
  double fail_over = 0.0;  // check: exit 1 when any aggregate exceeds this
  uint64_t seed = 1;
  SamplerParams sampler;

  // Data files; empty means the shipped default.
  std::filesystem::path capabilities;
  std::filesystem::path environment;
  std::filesystem::path group_schemas;
  std::filesystem::path seed_record;

  TreeOptions tree_options() const;
};

// Every field is optional in the file; unknown keys are rejected. Relative
// data paths resolve against the config file's directory.
CliConfig config_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
CliConfig load_config(const std::filesystem::path& path);
Json config_to_json(const CliConfig& config);

// Throws ConfigError naming the first out-of-bounds field.
void validate(const CliConfig& config);

// Shipped data directory: $PROVTREE_DATA_DIR, then the source tree, then the
// install prefix.
std::filesystem::path data_dir();
std::filesystem::path resolve_data(const std::filesystem::path& configured,
                                   std::string_view default_name);

}  // namespace provtree::cli

#endif  // PROVTREE_TOOLS_CONFIG_H_
