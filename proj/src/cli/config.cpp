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

#include "convduel/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>

namespace convduel::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const auto end = text.find(',', begin);
    const std::string item = trim(text.substr(begin, end == std::string::npos ? std::string::npos : end - begin));
    if (!item.empty()) out.push_back(item);
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used == value.size() && std::isfinite(out)) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
}

PairMode parse_pair_mode(const std::string& value) {
  if (value == "sampled-first") return PairMode::SampledFirst;
  if (value == "full-maxinp") return PairMode::FullMaxInp;
  if (value == "random") return PairMode::Random;
  throw ConfigError("pair-mode must be sampled-first, full-maxinp or random");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"algorithms",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.algorithms.clear();
         for (const auto& name : split_list(v)) c.algorithms.push_back(parse_policy_kind(name));
         if (c.algorithms.empty()) throw ConfigError("'algorithms' must list at least one algorithm");
       }},
      {"env", [](RunConfig& c, const std::string&, const std::string& v) { c.env_path = v; }},
      {"synth-users", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.num_users = parse_integer<Index>(k, v); }},
      {"synth-keyterms", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.num_keyterms = parse_integer<Index>(k, v); }},
      {"synth-arms", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.num_arms = parse_integer<Index>(k, v); }},
      {"synth-dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.dim = parse_integer<Index>(k, v); }},
      {"synth-max-arms", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.max_arms_per_keyterm = parse_integer<Index>(k, v); }},
      {"synth-seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth_seed = parse_integer<std::uint64_t>(k, v); }},
      {"link", [](RunConfig& c, const std::string&, const std::string& v) { c.synth.link = parse_link_kind(v); }},
      {"horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.horizon = parse_integer<long>(k, v); }},
      {"seeds", [](RunConfig& c, const std::string&, const std::string& v) { c.seeds = parse_seed_list(v); }},
      {"users", [](RunConfig& c, const std::string& k, const std::string& v) { c.num_users = parse_integer<Index>(k, v); }},
      {"schedule", [](RunConfig& c, const std::string&, const std::string& v) { c.schedule = parse_schedule(v); }},
      {"pool-size", [](RunConfig& c, const std::string& k, const std::string& v) { c.pool_size = parse_integer<Index>(k, v); }},
      {"lambda", [](RunConfig& c, const std::string& k, const std::string& v) { c.duel.lambda = parse_real(k, v); }},
      {"delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.duel.delta = parse_real(k, v); }},
      {"kappa1", [](RunConfig& c, const std::string& k, const std::string& v) { c.duel.kappa1 = parse_real(k, v); }},
      {"kappa2", [](RunConfig& c, const std::string& k, const std::string& v) { c.mnl.kappa2 = parse_real(k, v); }},
      {"tol",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.duel.mle.tol = parse_real(k, v);
         c.mnl.mle.tol = c.duel.mle.tol;
       }},
      {"max-iters",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.duel.mle.max_iters = parse_integer<int>(k, v);
         c.mnl.mle.max_iters = c.duel.mle.max_iters;
       }},
      {"alpha-scale",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.duel.alpha_scale = parse_real(k, v);
         c.mnl.alpha_scale = c.duel.alpha_scale;
       }},
      {"pair-mode", [](RunConfig& c, const std::string&, const std::string& v) { c.duel.pair_mode = parse_pair_mode(v); }},
      {"q", [](RunConfig& c, const std::string& k, const std::string& v) { c.mnl.q = parse_integer<Index>(k, v); }},
      {"t0", [](RunConfig& c, const std::string& k, const std::string& v) { c.mnl.warmup_rounds = parse_integer<long>(k, v); }},
      {"mnl-ridge", [](RunConfig& c, const std::string& k, const std::string& v) { c.mnl.initial_ridge = parse_real(k, v); }},
      {"threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = parse_integer<int>(k, v); }},
      {"out-dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
      {"axis", [](RunConfig& c, const std::string&, const std::string& v) { c.axis = v; }},
      {"values",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.axis_values.clear();
         for (const auto& item : split_list(v)) c.axis_values.push_back(parse_real(k, item));
         if (c.axis_values.empty()) throw ConfigError("'values' must not be empty");
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(config, key, trim(value));
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (std::find(run_keys().begin(), run_keys().end(), key) == run_keys().end()) {
      throw ConfigError(path + ":" + std::to_string(number) + ": unknown configuration key '" + key + "'");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void validate(const RunConfig& c) {
  if (c.algorithms.empty()) throw ConfigError("no algorithm selected");
  if (c.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (c.seeds.empty()) throw ConfigError("no seeds given");
  if (c.num_users < 1) throw ConfigError("users must be at least 1");
  if (c.pool_size < 2) throw ConfigError("pool-size must be at least 2");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  for (PolicyKind kind : c.algorithms) {
    PolicySpec spec;
    spec.kind = kind;
    spec.duel = c.duel;
    spec.mnl = c.mnl;
    spec.rconucb = c.rconucb;
    make_policy(spec, std::max<Index>(1, c.synth.dim), LinkFunction{c.synth.link});
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_integer<std::uint64_t>("seeds", item));
      continue;
    }
    const auto lo = parse_integer<std::uint64_t>("seeds", trim(item.substr(0, dash)));
    const auto hi = parse_integer<std::uint64_t>("seeds", trim(item.substr(dash + 1)));
    if (hi < lo || hi - lo > 1000000) throw ConfigError("bad seed range '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("seed list is empty");
  return out;
}

std::string default_output_dir() {
  const char* env = std::getenv("CONVDUEL_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("results");
}

ExperimentConfig experiment_config(const RunConfig& c, PolicyKind kind) {
  ExperimentConfig e;
  e.policy.kind = kind;
  e.policy.duel = c.duel;
  e.policy.mnl = c.mnl;
  e.policy.rconucb = c.rconucb;
  e.horizon = c.horizon;
  e.seeds = c.seeds;
  e.users.resize(static_cast<std::size_t>(c.num_users));
  std::iota(e.users.begin(), e.users.end(), Index{0});
  e.schedule = c.schedule;
  e.pool_size = c.pool_size;
  e.threads = c.threads;
  return e;
}

}  // namespace convduel::cli
