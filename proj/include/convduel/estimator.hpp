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

#ifndef CONVDUEL_ESTIMATOR_HPP_
#define CONVDUEL_ESTIMATOR_HPP_

#include <optional>
#include <vector>

#include "convduel/common.hpp"
#include "convduel/glm_core.hpp"
#include "convduel/link.hpp"

namespace convduel {

enum class FeedbackLevel { Arm, KeyTerm };

// Append-only log of pairwise comparisons. Row s of diffs() is the difference
// vector of comparison s; outcomes()(s) is 1 when its first element won.
class InteractionHistory {
 public:
  explicit InteractionHistory(Index dim = 0) : dim_(dim), diffs_(0, dim) {}

  Index dim() const { return dim_; }
  Index size() const { return size_; }
  Index count(FeedbackLevel level) const {
    return level == FeedbackLevel::Arm ? arm_count_ : size_ - arm_count_;
  }

  // Throws StructuralError on dimension mismatch or ||diff|| > 2 + 1e-9.
  void append(const Vector& diff, bool outcome, FeedbackLevel level);

  auto diffs() const { return diffs_.topRows(size_); }
  auto outcomes() const { return outcomes_.head(size_); }
  FeedbackLevel level(Index s) const { return levels_[static_cast<std::size_t>(s)]; }

 private:
  Index dim_;
  Index size_ = 0;
  Index arm_count_ = 0;
  RowMatrix diffs_;
  Vector outcomes_;
  std::vector<FeedbackLevel> levels_;
};

struct ThetaEstimate {
  Vector theta_raw;
  Vector theta_proj;
  bool projected = false;
  int newton_iters = 0;
  double grad_norm = 0.0;
};

struct MleOptions {
  double tol = 1e-8;
  int max_iters = 100;
  // Starting point; zero when empty.
  std::optional<Vector> initial;
};

// Regularized log-likelihood sum_s (o_s d_s^T theta - m(d_s^T theta)) - lambda/2 ||theta||^2.
double log_likelihood(const InteractionHistory& history, const Vector& theta, double lambda,
                      const LinkFunction& link);

// Gradient of log_likelihood: sum_s (o_s - mu(d_s^T theta)) d_s - lambda theta.
Vector score(const InteractionHistory& history, const Vector& theta, double lambda,
             const LinkFunction& link);

// g(theta) = sum_s mu(d_s^T theta) d_s + lambda theta.
Vector g_eval(const InteractionHistory& history, const Vector& theta, double lambda,
              const LinkFunction& link);

// lambda/kappa1 * I + sum_s d_s d_s^T over every observation in the history.
DesignMatrixd design_from_history(const InteractionHistory& history, double lambda,
                                  const LinkFunction& link);

// Argmin over the unit ball of ||g(theta) - g(theta_raw)||_{M^{-1}} by projected
// gradient descent with backtracking, started at theta_raw / ||theta_raw||.
// Inputs already inside the ball are returned unchanged.
Vector project_theta(const Vector& theta_raw, const InteractionHistory& history, double lambda,
                     const LinkFunction& link, const DesignMatrixd& design);

// Newton's method with step halving on the regularized log-likelihood. Throws
// NumericalError carrying the score norm when max_iters is exhausted. When the
// solution leaves the unit ball it is projected using `design`, or the design
// matrix rebuilt from the history when none is given.
ThetaEstimate mle_fit(const InteractionHistory& history, double lambda, const LinkFunction& link,
                      const MleOptions& options = {}, const DesignMatrixd* design = nullptr);

struct DuelRadiusParams {
  double lambda = 1.0;
  double kappa1 = 0.0;
  double sub_gaussian = 0.5;   // R
  double delta = 0.1;
  double theta_norm_bound = 1.0;
};

// Confidence radius
//   (2/kappa1) (R sqrt(d log((1 + 4 kappa1 (t + b(t)) / (d lambda)) / delta))
//               + sqrt(lambda kappa1) S).
double alpha_duel(double t, double b_of_t, Index dim, const DuelRadiusParams& params);

}  // namespace convduel

#endif  // CONVDUEL_ESTIMATOR_HPP_
