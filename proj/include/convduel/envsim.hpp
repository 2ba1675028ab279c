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

#ifndef CONVDUEL_ENVSIM_HPP_
#define CONVDUEL_ENVSIM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "convduel/common.hpp"
#include "convduel/glm_core.hpp"
#include "convduel/link.hpp"
#include "convduel/rng.hpp"

namespace convduel {

// The simulated world: arms, key-terms, the bipartite weight graph and one
// hidden preference vector per user. Immutable once built; runs for
// different users and seeds share it read-only.
struct Environment {
  LinkFunction link;
  RowMatrix arms;      // N x d, unit rows
  WeightGraph graph;   // N x K
  RowMatrix keyterms;  // K x d, derived from arms and graph
  RowMatrix users;     // U x d, unit rows (theta* per user)
  std::map<std::string, std::string> provenance;

  Index dim() const { return arms.cols(); }
  Index num_arms() const { return arms.rows(); }
  Index num_keyterms() const { return keyterms.rows(); }
  Index num_users() const { return users.rows(); }
  Vector theta_star(Index user) const;
};

// Derives key-term features and checks every invariant (unit rows within
// 1e-9, row-stochastic graph, matching dimensions, no orphan key-term).
Environment make_environment(LinkFunction link, RowMatrix arms, WeightGraph graph,
                             RowMatrix users, std::map<std::string, std::string> provenance = {});

struct SyntheticConfig {
  Index num_users = 200;
  Index num_keyterms = 500;
  Index num_arms = 5000;
  Index dim = 10;
  Index max_arms_per_keyterm = 10;  // M
  LinkKind link = LinkKind::Sigmoid;
};

// Gaussian users and arms normalized to the unit sphere; each key-term is
// related to n_k ~ U{1..M} random arms; an arm splits its weight equally over
// its key-terms, and an arm left without any key-term gets one at random.
Environment gen_synthetic(const SyntheticConfig& config, std::uint64_t seed);

// Samples feedback from the hidden preference vector of one user.
class FeedbackOracle {
 public:
  FeedbackOracle(const Environment& env, Index user);
  FeedbackOracle(const LinkFunction& link, Vector theta_star);

  const Vector& theta_star() const { return theta_; }
  const LinkFunction& link() const { return link_; }

  // 1 when `first` wins, drawn from Bernoulli(mu((first - second)^T theta*)).
  bool duel(const Vector& first, const Vector& second, RandomStream& rng) const;

  // Index of the chosen row of `offered`, or -1 for the outside option, drawn
  // from the MNL model at theta*.
  Index choose(const RowMatrix& offered, RandomStream& rng) const;

  // Click drawn from Bernoulli(sigmoid(x^T theta*)), whatever the link.
  bool click(const Vector& x, RandomStream& rng) const;

 private:
  LinkFunction link_;
  Vector theta_;
};

// Free-function forms of the two oracles.
bool sample_duel_feedback(const LinkFunction& link, const Vector& theta_star, const Vector& first,
                          const Vector& second, RandomStream& rng);
Index sample_choice_feedback(const Vector& theta_star, const RowMatrix& offered, RandomStream& rng);

enum class ScheduleKind { LinearFloor, LogFloor, Proportional };

// Cumulative conversation budget b(t):
//   LinearFloor(n):  n * floor(t / 50)
//   LogFloor(n):     n * floor(ln t)
//   Proportional(b): b * t
struct Schedule {
  ScheduleKind kind = ScheduleKind::LinearFloor;
  double param = 10.0;

  static Schedule linear_floor(double n) { return {ScheduleKind::LinearFloor, n}; }
  static Schedule log_floor(double n) { return {ScheduleKind::LogFloor, n}; }
  static Schedule proportional(double b) { return {ScheduleKind::Proportional, b}; }
  static Schedule none() { return {ScheduleKind::Proportional, 0.0}; }

  double budget(long t) const;
  // floor(b(t)) - floor(b(t - 1)); t >= 1.
  long conversations(long t) const;
};

long conversations_this_round(const Schedule& schedule, long t);
std::string to_string(const Schedule& schedule);
Schedule parse_schedule(const std::string& text);

// Arms offered in one round. ids are ascending; row i of features is arm ids[i].
struct ArmPool {
  long round = 0;
  std::vector<Index> ids;
  RowMatrix features;

  Index size() const { return static_cast<Index>(ids.size()); }
};

// Uniform draw of `size` distinct arms.
ArmPool sample_pool(const Environment& env, long round, Index size, RandomStream& rng);

// x_{a*}^T theta* - (x_a^T theta* + x_b^T theta*) / 2, with a* the best pool arm.
// `pair` holds pool positions.
double dueling_regret(const ArmPool& pool, const Vector& theta_star, std::pair<Index, Index> pair);

// R(C*, theta*) - R(C, theta*) where C* is the exact optimal assortment under
// the true utilities and revenues r_i = x_i^T theta*. `assortment` holds pool
// positions.
double mnl_regret(const ArmPool& pool, const Vector& theta_star, const std::vector<Index>& assortment,
                  Index max_size);

}  // namespace convduel

#endif  // CONVDUEL_ENVSIM_HPP_
