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

#ifndef CONVDUEL_EXPERIMENT_HPP_
#define CONVDUEL_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "convduel/conduel.hpp"
#include "convduel/conmnl.hpp"
#include "convduel/envsim.hpp"
#include "convduel/policy.hpp"
#include "convduel/spanner.hpp"

namespace convduel {

struct PolicySpec {
  PolicyKind kind = PolicyKind::ConDuel;
  DuelConfig duel;
  RconucbConfig rconucb;
  MnlConfig mnl;
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, Index dim, const LinkFunction& link);

// True when the policy draws key-terms from the barycentric spanner.
bool needs_spanner(PolicyKind kind);

struct ExperimentConfig {
  PolicySpec policy;
  long horizon = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::vector<Index> users{0};
  Schedule schedule = Schedule::linear_floor(10);
  Index pool_size = 50;
  int threads = 1;  // 0 picks the number of processors
};

// A run is one (user, seed) cell. Its streams are keyed by the label
// user * 100000 + seed, so every algorithm sees the same pools.
std::uint64_t run_label(Index user, std::uint64_t seed);

struct RunTrace {
  Index user = 0;
  std::uint64_t seed = 0;
  std::uint64_t label = 0;
  std::vector<double> instant;
  std::vector<double> cumulative;
};

struct RegretTrace {
  std::string algorithm;
  std::string fingerprint;
  std::vector<RunTrace> runs;  // ordered by (user, seed) as configured
  std::vector<double> mean_cum;
  std::vector<double> stderr_cum;

  long horizon() const { return static_cast<long>(mean_cum.size()); }
  double final_mean() const { return mean_cum.empty() ? 0.0 : mean_cum.back(); }
  double final_stderr() const { return stderr_cum.empty() ? 0.0 : stderr_cum.back(); }
};

// Raised when one run fails; carries where it happened.
class RunError : public std::runtime_error {
 public:
  RunError(const std::string& algorithm, Index user, std::uint64_t seed, long round,
           const std::string& cause);
  const std::string& algorithm() const { return algorithm_; }
  Index user() const { return user_; }
  std::uint64_t seed() const { return seed_; }
  long round() const { return round_; }

 private:
  std::string algorithm_;
  Index user_;
  std::uint64_t seed_;
  long round_;
};

// Plays one run. `spanner` may be null for policies that do not need it.
RunTrace run_single(const Environment& env, const Spanner* spanner, const ExperimentConfig& config,
                    Index user, std::uint64_t seed);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Every (user, seed) run of one algorithm, in a worker pool. Results do not
// depend on the thread count. A null spanner is built on demand.
RegretTrace run_experiment(const Environment& env, const Spanner* spanner,
                           const ExperimentConfig& config, const ProgressFn& progress = {});

std::string fingerprint(const ExperimentConfig& config);

// Mean and standard error across runs for every round.
void aggregate(RegretTrace& trace);

}  // namespace convduel

#endif  // CONVDUEL_EXPERIMENT_HPP_
