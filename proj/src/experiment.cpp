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

#include "convduel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace convduel {

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, Index dim, const LinkFunction& link) {
  switch (spec.kind) {
    case PolicyKind::ConDuel:
    case PolicyKind::ConDuelRandom:
    case PolicyKind::ConDuelMaxInp:
    case PolicyKind::MaxInp:
    case PolicyKind::RandomOpt:
      return std::make_unique<DuelPolicy>(spec.kind, dim, link, spec.duel);
    case PolicyKind::RconucbPosNeg:
    case PolicyKind::RconucbDiff:
      return std::make_unique<RconucbPolicy>(spec.kind, dim, spec.rconucb);
    case PolicyKind::ConMnl:
    case PolicyKind::ConMnlUcb:
    case PolicyKind::ConMnlRandom:
    case PolicyKind::UcbMnl:
      return std::make_unique<MnlPolicy>(spec.kind, dim, spec.mnl);
  }
  throw ConfigError("unknown policy kind");
}

bool needs_spanner(PolicyKind kind) {
  return kind == PolicyKind::ConDuel || family_of(kind) == PolicyFamily::Mnl;
}

std::uint64_t run_label(Index user, std::uint64_t seed) {
  return static_cast<std::uint64_t>(user) * 100000ULL + seed;
}

RunError::RunError(const std::string& algorithm, Index user, std::uint64_t seed, long round,
                   const std::string& cause)
    : std::runtime_error(algorithm + " failed (user " + std::to_string(user) + ", seed " +
                         std::to_string(seed) + ", round " + std::to_string(round) + "): " + cause),
      algorithm_(algorithm),
      user_(user),
      seed_(seed),
      round_(round) {}

namespace {

void validate(const Environment& env, const ExperimentConfig& config) {
  if (config.horizon < 1) throw ConfigError("horizon T must be at least 1");
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  if (config.users.empty()) throw ConfigError("at least one user is required");
  for (Index u : config.users) {
    if (u < 0 || u >= env.num_users()) {
      throw ConfigError("user " + std::to_string(u) + " is outside the environment's " +
                        std::to_string(env.num_users()) + " users");
    }
  }
  if (config.pool_size < 2 || config.pool_size > env.num_arms()) {
    throw ConfigError("pool size must lie in [2, " + std::to_string(env.num_arms()) + "]");
  }
  if (config.threads < 0) throw ConfigError("thread count must be non-negative");
  // Constructing a policy validates its constants.
  make_policy(config.policy, env.dim(), env.link);
}

}  // namespace

RunTrace run_single(const Environment& env, const Spanner* spanner, const ExperimentConfig& config,
                    Index user, std::uint64_t seed) {
  const PolicyKind kind = config.policy.kind;
  if (needs_spanner(kind) && spanner == nullptr) {
    throw StructuralError(std::string(to_string(kind)) + " needs a spanner");
  }
  RunTrace trace;
  trace.user = user;
  trace.seed = seed;
  trace.label = run_label(user, seed);
  trace.instant.reserve(static_cast<std::size_t>(config.horizon));
  trace.cumulative.reserve(static_cast<std::size_t>(config.horizon));

  auto policy = make_policy(config.policy, env.dim(), env.link);
  const FeedbackOracle oracle(env, user);
  const Vector& theta_star = oracle.theta_star();
  const bool mnl = family_of(kind) == PolicyFamily::Mnl;
  double total = 0.0;
  long t = 1;
  try {
    for (; t <= config.horizon; ++t) {
      RandomStream pool_rng(trace.label, static_cast<std::uint64_t>(t), Purpose::Pool);
      const ArmPool pool = sample_pool(env, t, config.pool_size, pool_rng);
      Vector revenues;
      RoundContext ctx;
      ctx.t = t;
      ctx.pool = &pool;
      ctx.env = &env;
      ctx.spanner = spanner;
      ctx.oracle = &oracle;
      ctx.conversations = config.schedule.conversations(t);
      ctx.budget = config.schedule.budget(t);
      ctx.seed = trace.label;
      if (mnl) {
        revenues = pool.features * theta_star;
        ctx.revenues = &revenues;
      }
      const RoundRecord record = policy->play_round(ctx);
      double regret = 0.0;
      if (mnl) {
        regret = mnl_regret(pool, theta_star, record.offered, config.policy.mnl.q);
      } else {
        regret = dueling_regret(pool, theta_star, {record.offered.at(0), record.offered.at(1)});
      }
      regret = std::max(0.0, regret);  // clears -1e-16 rounding
      total += regret;
      trace.instant.push_back(regret);
      trace.cumulative.push_back(total);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw RunError(std::string(to_string(kind)), user, seed, t, e.what());
  }
  return trace;
}

void aggregate(RegretTrace& trace) {
  trace.mean_cum.clear();
  trace.stderr_cum.clear();
  if (trace.runs.empty()) return;
  const std::size_t horizon = trace.runs.front().cumulative.size();
  const double n = static_cast<double>(trace.runs.size());
  trace.mean_cum.resize(horizon);
  trace.stderr_cum.resize(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    double sum = 0.0;
    for (const auto& run : trace.runs) sum += run.cumulative[i];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& run : trace.runs) ss += (run.cumulative[i] - mean) * (run.cumulative[i] - mean);
    trace.mean_cum[i] = mean;
    trace.stderr_cum[i] = trace.runs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
}

std::string fingerprint(const ExperimentConfig& c) {
  std::ostringstream out;
  out.precision(17);
  const PolicySpec& p = c.policy;
  out << "algorithm=" << to_string(p.kind) << ";T=" << c.horizon << ";schedule=" << to_string(c.schedule)
      << ";pool=" << c.pool_size << ";seeds=" << c.seeds.size() << ";users=" << c.users.size();
  switch (family_of(p.kind)) {
    case PolicyFamily::Dueling:
      out << ";lambda=" << p.duel.lambda << ";delta=" << p.duel.delta << ";kappa1=" << p.duel.kappa1
          << ";alpha_scale=" << p.duel.alpha_scale << ";tol=" << p.duel.mle.tol;
      break;
    case PolicyFamily::Mnl:
      out << ";q=" << p.mnl.q << ";T0=" << p.mnl.warmup_rounds << ";kappa2=" << p.mnl.kappa2
          << ";alpha_scale=" << p.mnl.alpha_scale << ";tol=" << p.mnl.mle.tol;
      break;
  }
  return out.str();
}

RegretTrace run_experiment(const Environment& env, const Spanner* spanner,
                           const ExperimentConfig& config, const ProgressFn& progress) {
  validate(env, config);
  std::optional<Spanner> own;
  if (spanner == nullptr && needs_spanner(config.policy.kind)) {
    own = build_spanner(env.keyterms);
    spanner = &*own;
  }

  struct Cell {
    Index user;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Index u : config.users) {
    for (std::uint64_t s : config.seeds) cells.push_back({u, s});
  }

  RegretTrace trace;
  trace.algorithm = std::string(to_string(config.policy.kind));
  trace.fingerprint = fingerprint(config);
  trace.runs.resize(cells.size());

  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::exception_ptr first_error;
  std::size_t first_error_cell = cells.size();

  const auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        trace.runs[i] = run_single(env, spanner, config, cells[i].user, cells[i].seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        // Report the lowest failing cell so the message is reproducible.
        if (i < first_error_cell) {
          first_error_cell = i;
          first_error = std::current_exception();
        }
        failed.store(true);
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(mutex);
        progress(finished, cells.size());
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  aggregate(trace);
  return trace;
}

}  // namespace convduel
