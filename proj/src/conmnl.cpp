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

#include "convduel/conmnl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "convduel/mnl.hpp"

namespace convduel {

Index ChoiceHistory::count(FeedbackLevel level) const {
  return static_cast<Index>(std::count(levels_.begin(), levels_.end(), level));
}

void ChoiceHistory::append(const RowMatrix& offered, Index chosen, FeedbackLevel level) {
  if (offered.rows() == 0) throw StructuralError("choice observation with nothing offered");
  if (offered.cols() != dim_) throw StructuralError("choice observation: dimension mismatch");
  if (chosen < -1 || chosen >= offered.rows()) throw StructuralError("choice index out of range");
  const Index begin = num_rows();
  const Index end = begin + offered.rows();
  if (end > rows_.rows()) rows_.conservativeResize(std::max<Index>(256, 2 * end), dim_);
  rows_.middleRows(begin, offered.rows()) = offered;
  starts_.push_back(end);
  chosen_.push_back(chosen);
  levels_.push_back(level);
}

namespace {

struct MnlEvaluation {
  double objective = 0.0;
  Vector gradient;
  Vector probs;  // per stored row
};

MnlEvaluation evaluate(const ChoiceHistory& h, const Vector& theta, bool with_gradient) {
  if (theta.size() != h.dim()) throw StructuralError("theta dimension does not match history");
  MnlEvaluation e;
  const auto x = h.rows();
  const Vector logits = x * theta;
  e.probs.resize(logits.size());
  Vector resid(logits.size());
  double obj = 0.0;
  for (Index s = 0; s < h.size(); ++s) {
    const Index b = h.start(s);
    const Index n = h.start(s + 1) - b;
    const double shift = std::max(0.0, logits.segment(b, n).maxCoeff());
    const auto ex = (logits.segment(b, n).array() - shift).exp();
    const double denom = std::exp(-shift) + ex.sum();
    e.probs.segment(b, n) = (ex / denom).matrix();
    const Index c = h.chosen(s);
    obj += (c >= 0 ? logits(b + c) : 0.0) - shift - std::log(denom);
    if (with_gradient) {
      resid.segment(b, n) = -e.probs.segment(b, n);
      if (c >= 0) resid(b + c) += 1.0;
    }
  }
  e.objective = obj;
  if (with_gradient) e.gradient = x.transpose() * resid;
  return e;
}

// Negative Hessian: sum_s (sum_i p_i x_i x_i^T - m_s m_s^T), m_s = sum_i p_i x_i.
Matrix fisher(const ChoiceHistory& h, const Vector& probs) {
  const auto x = h.rows();
  Matrix out = x.transpose() * probs.asDiagonal() * x;
  Vector mean(h.dim());
  for (Index s = 0; s < h.size(); ++s) {
    const Index b = h.start(s);
    const Index n = h.start(s + 1) - b;
    mean.noalias() = x.middleRows(b, n).transpose() * probs.segment(b, n);
    out.noalias() -= mean * mean.transpose();
  }
  return out;
}

}  // namespace

double mnl_log_likelihood(const ChoiceHistory& history, const Vector& theta) {
  return evaluate(history, theta, false).objective;
}

Vector mnl_score(const ChoiceHistory& history, const Vector& theta) {
  return evaluate(history, theta, true).gradient;
}

MnlFit mnl_mle_fit(const ChoiceHistory& history, const MleOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("mnl_mle_fit: tolerance must be positive");
  Vector theta = options.initial.value_or(Vector::Zero(history.dim()));
  MnlEvaluation cur = evaluate(history, theta, true);
  int iter = 0;
  for (; cur.gradient.norm() > options.tol; ++iter) {
    if (iter >= options.max_iters) {
      std::ostringstream msg;
      msg << "MNL MLE did not converge in " << options.max_iters
          << " Newton iterations (score norm " << cur.gradient.norm() << ")";
      throw NumericalError(msg.str(), cur.gradient.norm());
    }
    Matrix hess = fisher(history, cur.probs);
    hess.diagonal().array() += 1e-8;
    const Vector step = hess.ldlt().solve(cur.gradient);
    double scale = 1.0;
    MnlEvaluation next;
    const double slack = 1e-12 * (1.0 + std::abs(cur.objective));
    for (int h = 0; h < 60; ++h, scale *= 0.5) {
      next = evaluate(history, theta + scale * step, true);
      if (next.objective >= cur.objective - slack) break;
    }
    theta += scale * step;
    cur = std::move(next);
  }
  return {theta, iter, cur.gradient.norm()};
}

double alpha_mnl(double t, double b_of_t, Index dim, double kappa2) {
  if (!(t >= 1.0)) throw DomainError("alpha_mnl: t must be at least 1");
  if (b_of_t < 0.0 || dim <= 0 || !(kappa2 > 0.0)) {
    throw DomainError("alpha_mnl: arguments must be positive");
  }
  const double d = static_cast<double>(dim);
  return std::sqrt(2.0 * d * std::log(1.0 + (b_of_t + t) / d) + 2.0 * std::log(t)) / (2.0 * kappa2);
}

Vector ucb_utilities(const Vector& theta, const DesignMatrixd& design, double alpha,
                     const RowMatrix& features) {
  if (features.cols() != theta.size()) throw StructuralError("ucb_utilities: dimension mismatch");
  const RowMatrix projected = features * design.inverse();
  const Vector width = projected.cwiseProduct(features).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
  return features * theta + alpha * width;
}

double sampled_kappa2(const RowMatrix& arms, const Vector& theta_star, Index q, int samples,
                      RandomStream& rng) {
  if (q < 1 || samples < 1) throw DomainError("sampled_kappa2: q and samples must be positive");
  const Index d = theta_star.size();
  double lowest = std::numeric_limits<double>::infinity();
  RowMatrix offered;
  for (int s = 0; s < samples; ++s) {
    Vector dir(d);
    for (Index j = 0; j < d; ++j) dir(j) = rng.normal();
    // Uniform in the unit ball around theta*.
    const double radius = std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
    const Vector theta = theta_star + radius * dir.normalized();
    const Index n = 1 + rng.uniform_index(std::min(q, arms.rows()));
    const auto ids = rng.sample_without_replacement(arms.rows(), n);
    offered.resize(n, d);
    for (Index i = 0; i < n; ++i) offered.row(i) = arms.row(ids[static_cast<std::size_t>(i)]);
    const Vector p = mnl_probs(theta, offered);
    lowest = std::min(lowest, p.head(n).minCoeff() * p(n));
  }
  return lowest;
}

MnlPolicy::MnlPolicy(PolicyKind kind, Index dim, const MnlConfig& config)
    : kind_(kind),
      config_(config),
      history_(dim),
      design_(dim, config.initial_ridge),
      theta_(Vector::Zero(dim)) {
  if (family_of(kind) != PolicyFamily::Mnl) {
    throw ConfigError("MnlPolicy cannot run '" + std::string(to_string(kind)) + "'");
  }
  if (config.q < 1) throw ConfigError("assortment size q must be at least 1");
  if (config.warmup_rounds < 0) throw ConfigError("T0 must be non-negative");
  if (!(config.kappa2 > 0.0)) throw ConfigError("kappa2 must be positive");
  if (!(config.initial_ridge > 0.0)) throw ConfigError("initial ridge must be positive");
  if (!(config.alpha_scale >= 0.0)) throw ConfigError("alpha scale must be non-negative");
}

std::vector<Index> MnlPolicy::select_keyterms(const RoundContext& ctx, double alpha,
                                              RandomStream& rng) const {
  const RowMatrix& keyterms = ctx.env->keyterms;
  const Index q = config_.q;
  std::vector<Index> out;
  const bool warmup = ctx.t <= config_.warmup_rounds;
  if (warmup || kind_ == PolicyKind::ConMnl) {
    if (ctx.spanner == nullptr || ctx.spanner->member_ids.empty()) {
      throw StructuralError("ConMNL needs a barycentric spanner");
    }
    const auto& members = ctx.spanner->member_ids;
    for (Index i = 0; i < q; ++i) {
      out.push_back(members[static_cast<std::size_t>(rng.uniform_index(static_cast<Index>(members.size())))]);
    }
  } else if (kind_ == PolicyKind::ConMnlRandom) {
    out = rng.sample_without_replacement(keyterms.rows(), std::min(q, keyterms.rows()));
  } else {
    const Vector z = ucb_utilities(theta_, design_, alpha, keyterms);
    std::vector<Index> order(static_cast<std::size_t>(keyterms.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(q), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Index a, Index b) { return z(a) > z(b) || (z(a) == z(b) && a < b); });
    order.resize(take);
    out = std::move(order);
  }
  return out;
}

void MnlPolicy::check_warmup_curvature() const {
  Matrix gram = design_.matrix();
  gram.diagonal().array() -= config_.initial_ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues()(0);
  if (!(lowest > 1e-9)) {
    throw NumericalError("Gram matrix after the initialization phase is singular", lowest);
  }
}

RoundRecord MnlPolicy::play_round(const RoundContext& ctx) {
  const ArmPool& pool = *ctx.pool;
  const FeedbackOracle& oracle = *ctx.oracle;
  if (ctx.revenues == nullptr || ctx.revenues->size() != pool.size()) {
    throw StructuralError("MNL round needs one revenue per pool arm");
  }
  RoundRecord record;
  const auto round = static_cast<std::uint64_t>(ctx.t);
  const bool warmup = ctx.t <= config_.warmup_rounds;
  const Index d = history_.dim();

  if (!warmup) {
    record.alpha = config_.alpha_scale * alpha_mnl(static_cast<double>(ctx.t), ctx.budget, d, config_.kappa2);
  }

  if (converses() && ctx.conversations > 0) {
    RandomStream select_rng(ctx.seed, round, Purpose::KeytermSelect);
    RandomStream feedback_rng(ctx.seed, round, Purpose::KeytermFeedback);
    RowMatrix offered;
    for (long c = 0; c < ctx.conversations; ++c) {
      auto ids = select_keyterms(ctx, record.alpha, select_rng);
      offered.resize(static_cast<Index>(ids.size()), d);
      for (Index i = 0; i < offered.rows(); ++i) {
        offered.row(i) = ctx.env->keyterms.row(ids[static_cast<std::size_t>(i)]);
      }
      const Index chosen = oracle.choose(offered, feedback_rng);
      history_.append(offered, chosen, FeedbackLevel::KeyTerm);
      for (Index i = 0; i < offered.rows(); ++i) design_.rank_one_update(offered.row(i).transpose());
      record.conversations.push_back(std::move(ids));
    }
  }

  RandomStream arm_rng(ctx.seed, round, Purpose::ArmSelect);
  std::vector<Index> assortment;
  if (warmup) {
    assortment = arm_rng.sample_without_replacement(pool.size(), std::min(config_.q, pool.size()));
    std::sort(assortment.begin(), assortment.end());
  } else {
    if (!fitted_) check_warmup_curvature();
    MleOptions options = config_.mle;
    options.initial = theta_;
    theta_ = mnl_mle_fit(history_, options).theta;
    fitted_ = true;
    const Vector z = ucb_utilities(theta_, design_, record.alpha, pool.features);
    assortment = optimal_assortment(z, *ctx.revenues, config_.q);
  }
  record.candidates = pool.size();
  record.offered = assortment;
  record.outcome = -1;
  if (assortment.empty()) return record;

  RowMatrix offered(static_cast<Index>(assortment.size()), d);
  for (Index i = 0; i < offered.rows(); ++i) {
    offered.row(i) = pool.features.row(assortment[static_cast<std::size_t>(i)]);
  }
  RandomStream feedback_rng(ctx.seed, round, Purpose::ArmFeedback);
  const Index chosen = oracle.choose(offered, feedback_rng);
  history_.append(offered, chosen, FeedbackLevel::Arm);
  for (Index i = 0; i < offered.rows(); ++i) design_.rank_one_update(offered.row(i).transpose());
  record.outcome = chosen;
  return record;
}

}  // namespace convduel
