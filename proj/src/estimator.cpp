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

#include "convduel/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace convduel {

void InteractionHistory::append(const Vector& diff, bool outcome, FeedbackLevel level) {
  if (diff.size() != dim_) throw StructuralError("history append: dimension mismatch");
  if (diff.norm() > 2.0 + 1e-9) throw StructuralError("difference vector norm exceeds 2");
  if (size_ == diffs_.rows()) {
    const Index capacity = std::max<Index>(64, 2 * size_);
    diffs_.conservativeResize(capacity, dim_);
    outcomes_.conservativeResize(capacity);
  }
  diffs_.row(size_) = diff.transpose();
  outcomes_(size_) = outcome ? 1.0 : 0.0;
  levels_.push_back(level);
  if (level == FeedbackLevel::Arm) ++arm_count_;
  ++size_;
}

namespace {

// Everything needed at one theta, computed from a single pass over D theta.
struct Evaluation {
  Vector linear;  // D theta
  double objective = 0.0;
  Vector gradient;
  Vector deriv;   // mu'(D theta), filled with the gradient
};

// Per-row link terms. The sigmoid path shares one exp(-|z|) between the
// softplus, the link and its derivative.
struct LinkTerms {
  Eigen::ArrayXd mu;
  Eigen::ArrayXd deriv;
  Eigen::ArrayXd antideriv;
};

LinkTerms link_terms(LinkKind kind, const Vector& z, bool need_mu) {
  LinkTerms out;
  if (kind == LinkKind::Sigmoid) {
    const Eigen::ArrayXd e = (-z.array().abs()).exp();
    out.antideriv = z.array().max(0.0) + (1.0 + e).log();
    if (need_mu) {
      const Eigen::ArrayXd inv = 1.0 / (1.0 + e);
      out.mu = (z.array() >= 0.0).select(inv, e * inv);
      out.deriv = e * inv * inv;
    }
    return out;
  }
  out.antideriv = z.unaryExpr([kind](double v) { return link_antiderivative_unchecked(kind, v); });
  if (need_mu) {
    out.mu = z.unaryExpr([kind](double v) { return link_eval_unchecked(kind, v); });
    out.deriv = z.unaryExpr([kind](double v) { return link_deriv_unchecked(kind, v); });
  }
  return out;
}

// D^T diag(w) D + lambda I for non-negative w.
template <typename Rows>
Matrix weighted_gram(const Rows& d, const Vector& w, double lambda) {
  const RowMatrix scaled = w.cwiseSqrt().asDiagonal() * d;
  Matrix out = Matrix::Identity(d.cols(), d.cols()) * lambda;
  out.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  return out.selfadjointView<Eigen::Lower>();
}

Evaluation evaluate(const InteractionHistory& h, const Vector& theta, double lambda,
                    LinkKind kind, bool with_gradient) {
  Evaluation e;
  const auto d = h.diffs();
  const auto o = h.outcomes();
  e.linear = d * theta;
  LinkTerms terms = link_terms(kind, e.linear, with_gradient);
  e.objective = o.dot(e.linear) - terms.antideriv.sum() - 0.5 * lambda * theta.squaredNorm();
  if (with_gradient) {
    const Vector resid = o - terms.mu.matrix();
    e.gradient = d.transpose() * resid - lambda * theta;
    e.deriv = std::move(terms.deriv).matrix();
  }
  return e;
}

void check_theta(const InteractionHistory& h, const Vector& theta) {
  if (theta.size() != h.dim()) throw StructuralError("theta dimension does not match history");
}

}  // namespace

double log_likelihood(const InteractionHistory& history, const Vector& theta, double lambda,
                      const LinkFunction& link) {
  check_theta(history, theta);
  return evaluate(history, theta, lambda, link.kind, false).objective;
}

Vector score(const InteractionHistory& history, const Vector& theta, double lambda,
             const LinkFunction& link) {
  check_theta(history, theta);
  return evaluate(history, theta, lambda, link.kind, true).gradient;
}

Vector g_eval(const InteractionHistory& history, const Vector& theta, double lambda,
              const LinkFunction& link) {
  check_theta(history, theta);
  const auto d = history.diffs();
  Vector mu = d * theta;
  if (link.kind == LinkKind::Sigmoid) {
    mu = (1.0 / (1.0 + (-mu.array()).exp())).matrix();
  } else {
    for (Index s = 0; s < mu.size(); ++s) mu(s) = link_eval_unchecked(link.kind, mu(s));
  }
  return d.transpose() * mu + lambda * theta;
}

DesignMatrixd design_from_history(const InteractionHistory& history, double lambda,
                                  const LinkFunction& link) {
  DesignMatrixd m(history.dim(), lambda / link.kappa1());
  const auto d = history.diffs();
  for (Index s = 0; s < d.rows(); ++s) m.rank_one_update(d.row(s).transpose());
  return m;
}

namespace {

// argmin over ||y|| <= 1 of y^T H y + 2 c^T y for symmetric PSD H, via the
// eigenbasis of H and bisection on the multiplier of the ball constraint.
Vector ball_quadratic_min(const Matrix& h, const Vector& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  const Vector& lam = eig.eigenvalues();
  const Vector ct = eig.eigenvectors().transpose() * c;
  const auto solve = [&](double nu) {
    Vector z(ct.size());
    for (Index i = 0; i < ct.size(); ++i) {
      const double denom = lam(i) + nu;
      z(i) = denom > 0.0 ? -ct(i) / denom : 0.0;
    }
    return z;
  };
  const double floor = std::max(0.0, -lam(0));
  if (lam(0) > 1e-12 * std::max(1.0, lam(lam.size() - 1))) {
    const Vector z = solve(0.0);
    if (z.norm() <= 1.0) return eig.eigenvectors() * z;
  }
  double lo = floor;
  double hi = floor + ct.norm() + 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (solve(mid).norm() > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Vector y = eig.eigenvectors() * solve(hi);
  const double n = y.norm();
  if (n > 1.0) y /= n;
  return y;
}

}  // namespace

Vector project_theta(const Vector& theta_raw, const InteractionHistory& history, double lambda,
                     const LinkFunction& link, const DesignMatrixd& design) {
  check_theta(history, theta_raw);
  const double raw_norm = theta_raw.norm();
  if (raw_norm <= 1.0) return theta_raw;

  const auto d = history.diffs();
  const Matrix& m_inv = design.inverse();
  const Vector target = g_eval(history, theta_raw, lambda, link);
  const auto objective = [&](const Vector& theta, Vector* resid) {
    Vector r = g_eval(history, theta, lambda, link) - target;
    const double value = r.dot(m_inv * r);
    if (resid != nullptr) *resid = std::move(r);
    return value;
  };

  // Projected Gauss-Newton: linearize g at the iterate (Jacobian
  // J = D^T diag(mu') D + lambda I), minimize the linearized objective exactly
  // over the unit ball, then backtrack along the segment to that point.
  Vector theta = theta_raw / raw_norm;
  Vector resid;
  double value = objective(theta, &resid);
  constexpr int kMaxIters = 500;
  constexpr double kRelativeStop = 1e-10;
  Vector w(d.rows());
  for (int iter = 0; iter < kMaxIters && value > 0.0; ++iter) {
    const Vector lin = d * theta;
    w = link_terms(link.kind, lin, true).deriv.matrix();
    const Matrix jac = weighted_gram(d, w, lambda);
    const Matrix jm = jac * m_inv;
    Matrix h = jm * jac;
    h = 0.5 * (h + h.transpose()).eval();
    const Vector c = jm * (resid - jac * theta);
    const Vector target_point = ball_quadratic_min(h, c);

    double step = 1.0;
    bool accepted = false;
    Vector candidate;
    Vector cand_resid;
    double cand_value = value;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      candidate = theta + step * (target_point - theta);
      cand_value = objective(candidate, &cand_resid);
      if (cand_value < value) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double decrease = value - cand_value;
    theta = std::move(candidate);
    resid = std::move(cand_resid);
    value = cand_value;
    if (decrease <= kRelativeStop * (value + decrease)) break;
  }
  return theta;
}

ThetaEstimate mle_fit(const InteractionHistory& history, double lambda, const LinkFunction& link,
                      const MleOptions& options, const DesignMatrixd* design) {
  if (!(lambda > 0.0)) throw DomainError("mle_fit: lambda must be positive");
  if (!(options.tol > 0.0)) throw DomainError("mle_fit: tolerance must be positive");
  ThetaEstimate est;
  Vector theta = options.initial.value_or(Vector::Zero(history.dim()));
  check_theta(history, theta);

  Evaluation cur = evaluate(history, theta, lambda, link.kind, true);
  int iter = 0;
  for (; cur.gradient.norm() > options.tol; ++iter) {
    if (iter >= options.max_iters) {
      std::ostringstream msg;
      msg << "MLE did not converge in " << options.max_iters
          << " Newton iterations (score norm " << cur.gradient.norm() << ")";
      throw NumericalError(msg.str(), cur.gradient.norm());
    }
    const Matrix hess = weighted_gram(history.diffs(), cur.deriv, lambda);
    const Vector step = hess.llt().solve(cur.gradient);
    double scale = 1.0;
    Evaluation next;
    const double slack = 1e-12 * (1.0 + std::abs(cur.objective));
    for (int h = 0; h < 60; ++h, scale *= 0.5) {
      next = evaluate(history, theta + scale * step, lambda, link.kind, true);
      if (next.objective >= cur.objective - slack) break;
    }
    theta += scale * step;
    cur = std::move(next);
  }

  est.theta_raw = theta;
  est.newton_iters = iter;
  est.grad_norm = cur.gradient.norm();
  if (theta.norm() > 1.0) {
    est.projected = true;
    if (design != nullptr) {
      est.theta_proj = project_theta(theta, history, lambda, link, *design);
    } else {
      est.theta_proj = project_theta(theta, history, lambda, link,
                                     design_from_history(history, lambda, link));
    }
  } else {
    est.theta_proj = theta;
  }
  return est;
}

double alpha_duel(double t, double b_of_t, Index dim, const DuelRadiusParams& p) {
  if (!(t > 0.0) || b_of_t < 0.0 || dim <= 0 || !(p.lambda > 0.0) || !(p.kappa1 > 0.0) ||
      !(p.sub_gaussian > 0.0)) {
    throw DomainError("alpha_duel: arguments must be positive");
  }
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw DomainError("alpha_duel: delta must lie in (0, 1)");
  const double d = static_cast<double>(dim);
  const double arg = (1.0 + 4.0 * p.kappa1 * (t + b_of_t) / (d * p.lambda)) / p.delta;
  if (!(arg > 0.0)) throw DomainError("alpha_duel: log argument is not positive");
  const double log_term = std::log(arg);
  if (log_term < 0.0) throw DomainError("alpha_duel: negative log term");
  return (2.0 / p.kappa1) *
         (p.sub_gaussian * std::sqrt(d * log_term) + std::sqrt(p.lambda * p.kappa1) * p.theta_norm_bound);
}

}  // namespace convduel
