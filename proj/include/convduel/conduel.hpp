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

#ifndef CONVDUEL_CONDUEL_HPP_
#define CONVDUEL_CONDUEL_HPP_

#include <utility>
#include <vector>

#include "convduel/estimator.hpp"
#include "convduel/policy.hpp"

namespace convduel {

enum class PairMode {
  FullMaxInp,    // argmax over all candidate pairs of ||x_a - x_b||_{M^-1}
  SampledFirst,  // first arm uniform, second the most uncertain against it
  Random,        // two distinct uniform candidates
};

// Key-term pair for one conversation.
//   ConDuel:        two iid uniform spanner members
//   ConDuelRandom:  two iid uniform key-terms
//   ConDuelMaxInp:  argmax over key-term pairs of ||x_k - x_k'||_{M^-1}
std::pair<Index, Index> select_keyterm_pair(PolicyKind kind, const Spanner& spanner,
                                            const RowMatrix& keyterms, const DesignMatrixd& design,
                                            RandomStream& rng);

// Pair (i < j) maximizing ||x_i - x_j||_{M^-1}; lowest pair wins ties.
std::pair<Index, Index> max_informative_pair(const RowMatrix& features, const DesignMatrixd& design);

// Pool positions a with (x_a - x_b)^T theta + alpha ||x_a - x_b||_{M^-1} > 0
// for every other pool arm b. Arms with identical features are not compared.
// Returns the whole pool in the degenerate case where no arm qualifies.
std::vector<Index> build_candidate_set(const RowMatrix& pool_features, const Vector& theta,
                                       const DesignMatrixd& design, double alpha);

// Arm pair among `candidates` (pool positions). A single candidate is paired
// with itself.
std::pair<Index, Index> select_arm_pair(const std::vector<Index>& candidates,
                                        const RowMatrix& pool_features,
                                        const DesignMatrixd& design, PairMode mode,
                                        RandomStream& rng);

struct DuelConfig {
  double lambda = 1.0;
  double delta = 0.1;
  double kappa1 = 0.0;       // 0 picks the link's value
  double alpha_scale = 1.0;  // multiplies the confidence radius
  PairMode pair_mode = PairMode::SampledFirst;
  MleOptions mle;
};

// ConDuel and the GLM dueling baselines (ConDuelRandom, ConDuelMaxInp,
// MaxInp, RandomOpt).
class DuelPolicy : public Policy {
 public:
  DuelPolicy(PolicyKind kind, Index dim, const LinkFunction& link, const DuelConfig& config);

  PolicyKind kind() const override { return kind_; }
  RoundRecord play_round(const RoundContext& ctx) override;

  const InteractionHistory& history() const { return history_; }
  const DesignMatrixd& design() const { return design_; }
  const ThetaEstimate& estimate() const { return estimate_; }
  double kappa1() const { return kappa1_; }
  bool converses() const;

 private:
  PolicyKind kind_;
  LinkFunction link_;
  DuelConfig config_;
  double kappa1_;
  InteractionHistory history_;
  DesignMatrixd design_;
  ThetaEstimate estimate_;
};

struct RconucbConfig {
  double arm_weight = 0.5;   // lambda in the ConUCB arm-level ridge
  double keyterm_ridge = 1.0;
  double alpha = 0.25;       // arm-level exploration
  double alpha_keyterm = 0.25;
};

// Relative-feedback ConUCB baselines. Key-term comparisons feed a ridge
// regression at key-term level (PosNeg: winner -> 1, loser -> 0; Diff:
// winner - loser -> 1); its estimate is the prior of the arm-level ridge.
// Arms are chosen one at a time by LinUCB on Bernoulli(sigmoid(x^T theta*))
// clicks.
class RconucbPolicy : public Policy {
 public:
  RconucbPolicy(PolicyKind kind, Index dim, const RconucbConfig& config);

  PolicyKind kind() const override { return kind_; }
  RoundRecord play_round(const RoundContext& ctx) override;

  const Vector& arm_theta() const { return arm_theta_; }
  const Vector& keyterm_theta() const { return keyterm_theta_; }
  long keyterm_observations() const { return keyterm_obs_; }

 private:
  void refit();

  PolicyKind kind_;
  RconucbConfig config_;
  Matrix arm_gram_;      // (1 - w) sum x x^T + w I
  Vector arm_target_;    // (1 - w) sum r x
  Matrix keyterm_gram_;  // ridge I + sum x x^T
  Vector keyterm_target_;
  Matrix arm_inv_;
  Matrix keyterm_inv_;
  Vector arm_theta_;
  Vector keyterm_theta_;
  long keyterm_obs_ = 0;
};

}  // namespace convduel

#endif  // CONVDUEL_CONDUEL_HPP_
