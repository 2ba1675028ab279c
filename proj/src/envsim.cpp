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

#include "convduel/envsim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "convduel/mnl.hpp"

namespace convduel {

Vector Environment::theta_star(Index user) const {
  if (user < 0 || user >= users.rows()) throw StructuralError("user index out of range");
  return users.row(user).transpose();
}

namespace {

void require_unit_rows(const RowMatrix& m, const char* what) {
  for (Index i = 0; i < m.rows(); ++i) {
    if (std::abs(m.row(i).norm() - 1.0) > 1e-9) {
      throw StructuralError(std::string(what) + " row " + std::to_string(i) + " is not unit norm");
    }
  }
}

RowMatrix gaussian_unit_rows(Index rows, Index cols, RandomStream& rng) {
  RowMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    m.row(i).normalize();
  }
  return m;
}

}  // namespace

Environment make_environment(LinkFunction link, RowMatrix arms, WeightGraph graph,
                             RowMatrix users, std::map<std::string, std::string> provenance) {
  if (arms.rows() == 0 || arms.cols() == 0) throw StructuralError("environment has no arms");
  if (graph.num_arms() != arms.rows()) throw StructuralError("weight graph / arm count mismatch");
  if (users.cols() != arms.cols()) throw StructuralError("user / arm dimension mismatch");
  require_unit_rows(arms, "arm");
  require_unit_rows(users, "user");
  Environment env;
  env.link = link;
  env.keyterms = keyterm_features(graph, arms);
  env.arms = std::move(arms);
  env.graph = std::move(graph);
  env.users = std::move(users);
  env.provenance = std::move(provenance);
  return env;
}

Environment gen_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  if (config.num_users < 1 || config.num_keyterms < 1 || config.num_arms < 2 || config.dim < 1 ||
      config.max_arms_per_keyterm < 1) {
    throw ConfigError("synthetic environment sizes must be positive (and at least 2 arms)");
  }
  if (config.max_arms_per_keyterm > config.num_arms) {
    throw ConfigError("max arms per key-term exceeds the number of arms");
  }
  RandomStream rng(seed, 0, Purpose::Environment);
  RowMatrix users = gaussian_unit_rows(config.num_users, config.dim, rng);
  RowMatrix arms = gaussian_unit_rows(config.num_arms, config.dim, rng);

  std::vector<std::vector<Index>> arm_keyterms(static_cast<std::size_t>(config.num_arms));
  for (Index k = 0; k < config.num_keyterms; ++k) {
    const Index n_k = 1 + rng.uniform_index(config.max_arms_per_keyterm);
    for (Index a : rng.sample_without_replacement(config.num_arms, n_k)) {
      arm_keyterms[static_cast<std::size_t>(a)].push_back(k);
    }
  }
  std::vector<WeightTriple> triples;
  for (Index a = 0; a < config.num_arms; ++a) {
    auto& related = arm_keyterms[static_cast<std::size_t>(a)];
    if (related.empty()) related.push_back(rng.uniform_index(config.num_keyterms));
    std::sort(related.begin(), related.end());
    const double w = 1.0 / static_cast<double>(related.size());
    for (Index k : related) triples.push_back({a, k, w});
  }
  WeightGraph graph(config.num_arms, config.num_keyterms, triples);

  std::map<std::string, std::string> provenance{
      {"source", "synthetic"},
      {"seed", std::to_string(seed)},
      {"num_users", std::to_string(config.num_users)},
      {"num_keyterms", std::to_string(config.num_keyterms)},
      {"num_arms", std::to_string(config.num_arms)},
      {"max_arms_per_keyterm", std::to_string(config.max_arms_per_keyterm)},
  };
  return make_environment(LinkFunction{config.link}, std::move(arms), std::move(graph),
                          std::move(users), std::move(provenance));
}

FeedbackOracle::FeedbackOracle(const Environment& env, Index user)
    : link_(env.link), theta_(env.theta_star(user)) {}

FeedbackOracle::FeedbackOracle(const LinkFunction& link, Vector theta_star)
    : link_(link), theta_(std::move(theta_star)) {}

bool FeedbackOracle::duel(const Vector& first, const Vector& second, RandomStream& rng) const {
  return sample_duel_feedback(link_, theta_, first, second, rng);
}

Index FeedbackOracle::choose(const RowMatrix& offered, RandomStream& rng) const {
  return sample_choice_feedback(theta_, offered, rng);
}

bool FeedbackOracle::click(const Vector& x, RandomStream& rng) const {
  return rng.bernoulli(link_eval_unchecked(LinkKind::Sigmoid, x.dot(theta_)));
}

bool sample_duel_feedback(const LinkFunction& link, const Vector& theta_star, const Vector& first,
                          const Vector& second, RandomStream& rng) {
  return rng.bernoulli(duel_prob(link, theta_star, first, second));
}

Index sample_choice_feedback(const Vector& theta_star, const RowMatrix& offered, RandomStream& rng) {
  const Vector p = mnl_probs(theta_star, offered);
  const Index pick = rng.categorical(p);
  return pick == offered.rows() ? Index{-1} : pick;
}

double Schedule::budget(long t) const {
  if (t <= 0) return 0.0;
  switch (kind) {
    case ScheduleKind::LinearFloor:
      return param * static_cast<double>(t / 50);
    case ScheduleKind::LogFloor:
      return param * std::floor(std::log(static_cast<double>(t)));
    case ScheduleKind::Proportional:
      return param * static_cast<double>(t);
  }
  return 0.0;
}

long Schedule::conversations(long t) const {
  if (t < 1) throw DomainError("conversation schedule is defined for t >= 1");
  return static_cast<long>(std::floor(budget(t))) - static_cast<long>(std::floor(budget(t - 1)));
}

long conversations_this_round(const Schedule& schedule, long t) { return schedule.conversations(t); }

std::string to_string(const Schedule& s) {
  std::ostringstream out;
  out.precision(17);
  switch (s.kind) {
    case ScheduleKind::LinearFloor: out << "linear:" << s.param; break;
    case ScheduleKind::LogFloor: out << "log:" << s.param; break;
    case ScheduleKind::Proportional: out << "proportional:" << s.param; break;
  }
  return out.str();
}

Schedule parse_schedule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("schedule must look like linear:<n>, log:<n> or proportional:<b>");
  }
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("bad schedule parameter in '" + text + "'");
  }
  if (!(value >= 0.0)) throw ConfigError("schedule parameter must be non-negative");
  if (kind == "linear") return Schedule::linear_floor(value);
  if (kind == "log") return Schedule::log_floor(value);
  if (kind == "proportional") {
    if (value > 1.0) throw ConfigError("proportional schedule needs b <= 1 so that b(t) <= t");
    return Schedule::proportional(value);
  }
  throw ConfigError("unknown schedule kind '" + kind + "'");
}

ArmPool sample_pool(const Environment& env, long round, Index size, RandomStream& rng) {
  if (size < 2) throw ConfigError("arm pool needs at least two arms");
  if (size > env.num_arms()) throw ConfigError("pool size exceeds the number of arms");
  ArmPool pool;
  pool.round = round;
  pool.ids = rng.sample_without_replacement(env.num_arms(), size);
  std::sort(pool.ids.begin(), pool.ids.end());
  pool.features.resize(size, env.dim());
  for (Index i = 0; i < size; ++i) pool.features.row(i) = env.arms.row(pool.ids[static_cast<std::size_t>(i)]);
  return pool;
}

double dueling_regret(const ArmPool& pool, const Vector& theta_star, std::pair<Index, Index> pair) {
  const Vector u = pool.features * theta_star;
  return u.maxCoeff() - 0.5 * (u(pair.first) + u(pair.second));
}

double mnl_regret(const ArmPool& pool, const Vector& theta_star, const std::vector<Index>& assortment,
                  Index max_size) {
  const Vector u = pool.features * theta_star;
  const auto best = optimal_assortment(u, u, max_size);
  return assortment_value(u, u, best) - assortment_value(u, u, assortment);
}

}  // namespace convduel
