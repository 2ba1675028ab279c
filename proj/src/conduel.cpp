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

#include "convduel/conduel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace convduel {

std::pair<Index, Index> max_informative_pair(const RowMatrix& features, const DesignMatrixd& design) {
  const Index n = features.rows();
  if (n == 0) throw StructuralError("max_informative_pair over an empty set");
  if (n == 1) return {0, 0};
  // ||x_i - x_j||^2 = q_i + q_j - 2 x_i^T M^-1 x_j
  const RowMatrix projected = features * design.inverse();
  const Vector quad = projected.cwiseProduct(features).rowwise().sum();
  std::pair<Index, Index> best{0, 1};
  double best_value = -1.0;
  Vector cross(n);
  for (Index i = 0; i + 1 < n; ++i) {
    cross.tail(n - i - 1).noalias() = features.bottomRows(n - i - 1) * projected.row(i).transpose();
    for (Index j = i + 1; j < n; ++j) {
      const double value = quad(i) + quad(j) - 2.0 * cross(j);
      if (value > best_value) {
        best_value = value;
        best = {i, j};
      }
    }
  }
  return best;
}

std::pair<Index, Index> select_keyterm_pair(PolicyKind kind, const Spanner& spanner,
                                            const RowMatrix& keyterms, const DesignMatrixd& design,
                                            RandomStream& rng) {
  if (keyterms.rows() == 0) throw StructuralError("no key-terms to converse about");
  switch (kind) {
    case PolicyKind::ConDuel: {
      const auto members = static_cast<Index>(spanner.member_ids.size());
      if (members == 0) throw StructuralError("empty barycentric spanner");
      const Index a = spanner.member_ids[static_cast<std::size_t>(rng.uniform_index(members))];
      const Index b = spanner.member_ids[static_cast<std::size_t>(rng.uniform_index(members))];
      return {a, b};
    }
    case PolicyKind::ConDuelRandom: {
      const Index a = rng.uniform_index(keyterms.rows());
      const Index b = rng.uniform_index(keyterms.rows());
      return {a, b};
    }
    case PolicyKind::ConDuelMaxInp:
      return max_informative_pair(keyterms, design);
    default:
      throw StructuralError("policy '" + std::string(to_string(kind)) + "' does not converse");
  }
}

std::vector<Index> build_candidate_set(const RowMatrix& pool_features, const Vector& theta,
                                       const DesignMatrixd& design, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("candidate radius must be non-negative");
  const Index n = pool_features.rows();
  const Vector utility = pool_features * theta;
  // ||x_a - x_b||^2_{M^-1} = G_aa + G_bb - 2 G_ab with G = X M^-1 X^T.
  const RowMatrix projected = pool_features * design.inverse();
  const Matrix gram = projected * pool_features.transpose();
  std::vector<Index> out;
  for (Index a = 0; a < n; ++a) {
    bool keep = true;
    for (Index b = 0; b < n && keep; ++b) {
      if (b == a) continue;
      const double sq = gram(a, a) + gram(b, b) - 2.0 * gram(a, b);
      if (sq <= 1e-14 && pool_features.row(a) == pool_features.row(b)) continue;
      keep = (utility(a) - utility(b)) + alpha * std::sqrt(std::max(0.0, sq)) > 0.0;
    }
    if (keep) out.push_back(a);
  }
  if (out.empty()) {
    out.resize(static_cast<std::size_t>(n));
    for (Index a = 0; a < n; ++a) out[static_cast<std::size_t>(a)] = a;
  }
  return out;
}

std::pair<Index, Index> select_arm_pair(const std::vector<Index>& candidates,
                                        const RowMatrix& pool_features,
                                        const DesignMatrixd& design, PairMode mode,
                                        RandomStream& rng) {
  if (candidates.empty()) throw StructuralError("empty candidate set");
  const auto count = static_cast<Index>(candidates.size());
  if (count == 1) return {candidates.front(), candidates.front()};
  const auto at = [&](Index i) { return candidates[static_cast<std::size_t>(i)]; };

  switch (mode) {
    case PairMode::FullMaxInp: {
      RowMatrix sub(count, pool_features.cols());
      for (Index i = 0; i < count; ++i) sub.row(i) = pool_features.row(at(i));
      const auto [i, j] = max_informative_pair(sub, design);
      return {at(i), at(j)};
    }
    case PairMode::SampledFirst: {
      const Index first = at(rng.uniform_index(count));
      Index second = first;
      double best = -1.0;
      for (Index i = 0; i < count; ++i) {
        const Vector diff = pool_features.row(at(i)).transpose() - pool_features.row(first).transpose();
        const double value = design.mahalanobis_sq(diff);
        if (value > best) {
          best = value;
          second = at(i);
        }
      }
      return {first, second};
    }
    case PairMode::Random: {
      const auto picks = rng.sample_without_replacement(count, 2);
      return {at(picks[0]), at(picks[1])};
    }
  }
  throw StructuralError("unknown pair mode");
}

DuelPolicy::DuelPolicy(PolicyKind kind, Index dim, const LinkFunction& link, const DuelConfig& config)
    : kind_(kind),
      link_(link),
      config_(config),
      kappa1_(config.kappa1 > 0.0 ? config.kappa1 : link.kappa1()),
      history_(dim),
      design_(dim, config.lambda / (config.kappa1 > 0.0 ? config.kappa1 : link.kappa1())) {
  switch (kind) {
    case PolicyKind::ConDuel:
    case PolicyKind::ConDuelRandom:
    case PolicyKind::ConDuelMaxInp:
    case PolicyKind::MaxInp:
    case PolicyKind::RandomOpt:
      break;
    default:
      throw ConfigError("DuelPolicy cannot run '" + std::string(to_string(kind)) + "'");
  }
  if (!(config.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(config.alpha_scale >= 0.0)) throw ConfigError("alpha scale must be non-negative");
  estimate_.theta_raw = Vector::Zero(dim);
  estimate_.theta_proj = Vector::Zero(dim);
}

bool DuelPolicy::converses() const {
  return kind_ == PolicyKind::ConDuel || kind_ == PolicyKind::ConDuelRandom ||
         kind_ == PolicyKind::ConDuelMaxInp;
}

RoundRecord DuelPolicy::play_round(const RoundContext& ctx) {
  const ArmPool& pool = *ctx.pool;
  const Environment& env = *ctx.env;
  const FeedbackOracle& oracle = *ctx.oracle;
  RoundRecord record;

  if (converses() && ctx.conversations > 0) {
    RandomStream select_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::KeytermSelect);
    RandomStream feedback_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::KeytermFeedback);
    static const Spanner kNoSpanner{};
    const Spanner& spanner = ctx.spanner != nullptr ? *ctx.spanner : kNoSpanner;
    for (long c = 0; c < ctx.conversations; ++c) {
      const auto [k1, k2] = select_keyterm_pair(kind_, spanner, env.keyterms, design_, select_rng);
      const Vector x1 = env.keyterms.row(k1).transpose();
      const Vector x2 = env.keyterms.row(k2).transpose();
      const bool won = oracle.duel(x1, x2, feedback_rng);
      const Vector diff = x1 - x2;
      history_.append(diff, won, FeedbackLevel::KeyTerm);
      design_.rank_one_update(diff);
      record.conversations.push_back({k1, k2});
    }
  }

  MleOptions options = config_.mle;
  options.initial = estimate_.theta_raw;
  estimate_ = mle_fit(history_, config_.lambda, link_, options, &design_);

  DuelRadiusParams radius;
  radius.lambda = config_.lambda;
  radius.kappa1 = kappa1_;
  radius.delta = config_.delta;
  record.alpha = config_.alpha_scale *
                 alpha_duel(static_cast<double>(ctx.t), ctx.budget, history_.dim(), radius);

  const auto candidates = build_candidate_set(pool.features, estimate_.theta_proj, design_, record.alpha);
  record.candidates = static_cast<Index>(candidates.size());
  const PairMode mode = kind_ == PolicyKind::RandomOpt ? PairMode::Random : config_.pair_mode;
  RandomStream arm_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::ArmSelect);
  const auto [a, b] = select_arm_pair(candidates, pool.features, design_, mode, arm_rng);

  const Vector xa = pool.features.row(a).transpose();
  const Vector xb = pool.features.row(b).transpose();
  RandomStream feedback_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::ArmFeedback);
  const bool won = oracle.duel(xa, xb, feedback_rng);
  const Vector diff = xa - xb;
  history_.append(diff, won, FeedbackLevel::Arm);
  design_.rank_one_update(diff);

  record.offered = {a, b};
  record.outcome = won ? 1 : 0;
  return record;
}

RconucbPolicy::RconucbPolicy(PolicyKind kind, Index dim, const RconucbConfig& config)
    : kind_(kind), config_(config) {
  if (kind != PolicyKind::RconucbPosNeg && kind != PolicyKind::RconucbDiff) {
    throw ConfigError("RconucbPolicy cannot run '" + std::string(to_string(kind)) + "'");
  }
  if (!(config.arm_weight > 0.0 && config.arm_weight < 1.0)) {
    throw ConfigError("Rconucb arm weight must lie in (0, 1)");
  }
  if (!(config.keyterm_ridge > 0.0)) throw ConfigError("Rconucb key-term ridge must be positive");
  arm_gram_ = Matrix::Identity(dim, dim) * config.arm_weight;
  arm_target_ = Vector::Zero(dim);
  keyterm_gram_ = Matrix::Identity(dim, dim) * config.keyterm_ridge;
  keyterm_target_ = Vector::Zero(dim);
  refit();
}

void RconucbPolicy::refit() {
  const Index d = arm_gram_.rows();
  keyterm_inv_ = keyterm_gram_.ldlt().solve(Matrix::Identity(d, d));
  arm_inv_ = arm_gram_.ldlt().solve(Matrix::Identity(d, d));
  keyterm_theta_ = keyterm_inv_ * keyterm_target_;
  arm_theta_ = arm_inv_ * (arm_target_ + config_.arm_weight * keyterm_theta_);
}

RoundRecord RconucbPolicy::play_round(const RoundContext& ctx) {
  const ArmPool& pool = *ctx.pool;
  const Environment& env = *ctx.env;
  const FeedbackOracle& oracle = *ctx.oracle;
  RoundRecord record;
  const double w = config_.arm_weight;

  if (ctx.conversations > 0) {
    RandomStream select_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::KeytermSelect);
    RandomStream feedback_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::KeytermFeedback);
    for (long c = 0; c < ctx.conversations; ++c) {
      const Index k1 = select_rng.uniform_index(env.num_keyterms());
      const Index k2 = select_rng.uniform_index(env.num_keyterms());
      const Vector x1 = env.keyterms.row(k1).transpose();
      const Vector x2 = env.keyterms.row(k2).transpose();
      const bool first_won = oracle.duel(x1, x2, feedback_rng);
      const Vector& winner = first_won ? x1 : x2;
      const Vector& loser = first_won ? x2 : x1;
      if (kind_ == PolicyKind::RconucbPosNeg) {
        keyterm_gram_.noalias() += winner * winner.transpose() + loser * loser.transpose();
        keyterm_target_ += winner;
        keyterm_obs_ += 2;
      } else {
        const Vector diff = winner - loser;
        keyterm_gram_.noalias() += diff * diff.transpose();
        keyterm_target_ += diff;
        keyterm_obs_ += 1;
      }
      record.conversations.push_back({k1, k2});
    }
    refit();
  }

  // ConUCB index: x^T theta + w alpha ||x||_{A^-1} + (1 - w) alpha_k ||A^-1 x||_{K^-1}
  Index best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < pool.size(); ++i) {
    const Vector x = pool.features.row(i).transpose();
    const Vector ax = arm_inv_ * x;
    const double value = x.dot(arm_theta_) + w * config_.alpha * std::sqrt(std::max(0.0, x.dot(ax))) +
                         (1.0 - w) * config_.alpha_keyterm * std::sqrt(std::max(0.0, ax.dot(keyterm_inv_ * ax)));
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }

  const Vector x = pool.features.row(best).transpose();
  RandomStream feedback_rng(ctx.seed, static_cast<std::uint64_t>(ctx.t), Purpose::ArmFeedback);
  const bool clicked = oracle.click(x, feedback_rng);
  arm_gram_.noalias() += (1.0 - w) * x * x.transpose();
  if (clicked) arm_target_ += (1.0 - w) * x;
  refit();

  record.offered = {best, best};
  record.outcome = clicked ? 1 : 0;
  record.candidates = pool.size();
  return record;
}

}  // namespace convduel
