// Copyright 2026 The convduel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONVDUEL_CLI_CONFIG_HPP_
#define CONVDUEL_CLI_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "convduel/envsim.hpp"
#include "convduel/experiment.hpp"

namespace convduel::cli {

// Everything `run` and `sweep` need. Keys of the config file match the long
// flag names (see kRunKeys).
struct RunConfig {
  std::vector<PolicyKind> algorithms{PolicyKind::ConDuel};
  std::string env_path;  // empty: synthetic environment below
  SyntheticConfig synth{};
  std::uint64_t synth_seed = 1;
  long horizon = 1000;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Index num_users = 20;
  Schedule schedule = Schedule::linear_floor(10);
  Index pool_size = 50;
  DuelConfig duel;
  MnlConfig mnl;
  RconucbConfig rconucb;
  int threads = 0;
  std::string out_dir;
  // sweep only
  std::string axis;
  std::vector<double> axis_values;
};

// Keys accepted in config files and as --flags of `run` and `sweep`.
const std::vector<std::string>& run_keys();

// Applies one key=value; throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Parses a flat "key = value" file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Checks cross-field constraints once all settings are applied.
void validate(const RunConfig& config);

// "0-9", "1,4,7" or a mix such as "0-2,8".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// Default output directory: $CONVDUEL_OUTPUT_DIR or "results".
std::string default_output_dir();

ExperimentConfig experiment_config(const RunConfig& config, PolicyKind kind);

}  // namespace convduel::cli

#endif  // CONVDUEL_CLI_CONFIG_HPP_
