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

#ifndef CONVDUEL_CONMNL_HPP_
#define CONVDUEL_CONMNL_HPP_

#include <optional>
#include <vector>

#include "convduel/estimator.hpp"
#include "convduel/policy.hpp"

namespace convduel {

// Choice observations stored back to back: the offered rows of observation s
// are rows [start(s), start(s + 1)) of rows(). chosen(s) is an offset into
// that block, or -1 for the outside option.
class ChoiceHistory {
 public:
  explicit ChoiceHistory(Index dim = 0) : dim_(dim), rows_(0, dim) { starts_.push_back(0); }

  Index dim() const { return dim_; }
  Index size() const { return static_cast<Index>(chosen_.size()); }
  Index num_rows() const { return starts_.back(); }
  Index count(FeedbackLevel level) const;

  // Throws StructuralError on an empty offer, a dimension mismatch or a
  // chosen index outside [-1, offered.rows()).
  void append(const RowMatrix& offered, Index chosen, FeedbackLevel level);

  auto rows() const { return rows_.topRows(num_rows()); }
  Index start(Index s) const { return starts_[static_cast<std::size_t>(s)]; }
  Index chosen(Index s) const { return chosen_[static_cast<std::size_t>(s)]; }
  FeedbackLevel level(Index s) const { return levels_[static_cast<std::size_t>(s)]; }

 private:
  Index dim_;
  RowMatrix rows_;
  std::vector<Index> starts_;
  std::vector<Index> chosen_;
  std::vector<FeedbackLevel> levels_;
};

double mnl_log_likelihood(const ChoiceHistory& history, const Vector& theta);
Vector mnl_score(const ChoiceHistory& history, const Vector& theta);

struct MnlFit {
  Vector theta;
  int newton_iters = 0;
  double grad_norm = 0.0;
};

// Unregularized multinomial MLE by Newton from options.initial (zero when
// empty). A 1e-8 ridge enters the Newton solve only. Throws NumericalError
// when the score norm is still above tol after max_iters.
MnlFit mnl_mle_fit(const ChoiceHistory& history, const MleOptions& options = {});

// (1 / (2 kappa2)) sqrt(2 d log(1 + (b + t) / d) + 2 log t).
double alpha_mnl(double t, double b_of_t, Index dim, double kappa2);

// z_a = x_a^T theta + alpha ||x_a||_{M^-1} per row.
Vector ucb_utilities(const Vector& theta, const DesignMatrixd& design, double alpha,
                     const RowMatrix& features);

// Smallest p_i(C, theta) p_0(C, theta) seen over `samples` random draws of
// theta within unit distance of theta* and assortments of 1..q arms.
double sampled_kappa2(const RowMatrix& arms, const Vector& theta_star, Index q, int samples,
                      RandomStream& rng);

struct MnlConfig {
  Index q = 4;
  long warmup_rounds = 50;  // T0
  double kappa2 = 0.05;
  double initial_ridge = 1.0;  // M_0 = initial_ridge * I
  double alpha_scale = 1.0;
  MleOptions mle;
};

// ConMNL and its baselines. Rounds t <= T0 explore: spanner key-terms and a
// uniformly random assortment. Afterwards the MLE drives UCB utilities and
// the assortment is the exact revenue maximizer.
class MnlPolicy : public Policy {
 public:
  MnlPolicy(PolicyKind kind, Index dim, const MnlConfig& config);

  PolicyKind kind() const override { return kind_; }
  RoundRecord play_round(const RoundContext& ctx) override;

  const ChoiceHistory& history() const { return history_; }
  const DesignMatrixd& design() const { return design_; }
  const Vector& theta() const { return theta_; }
  bool converses() const { return kind_ != PolicyKind::UcbMnl; }

 private:
  std::vector<Index> select_keyterms(const RoundContext& ctx, double alpha, RandomStream& rng) const;
  void check_warmup_curvature() const;

  PolicyKind kind_;
  MnlConfig config_;
  ChoiceHistory history_;
  DesignMatrixd design_;
  Vector theta_;
  bool fitted_ = false;
};

}  // namespace convduel

#endif  // CONVDUEL_CONMNL_HPP_
