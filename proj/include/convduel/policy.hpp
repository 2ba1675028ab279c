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

#ifndef CONVDUEL_POLICY_HPP_
#define CONVDUEL_POLICY_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "convduel/envsim.hpp"
#include "convduel/spanner.hpp"

namespace convduel {

enum class PolicyKind {
  ConDuel,
  ConDuelRandom,
  ConDuelMaxInp,
  MaxInp,
  RandomOpt,
  RconucbPosNeg,
  RconucbDiff,
  ConMnl,
  ConMnlUcb,
  ConMnlRandom,
  UcbMnl,
};

enum class PolicyFamily { Dueling, Mnl };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);
PolicyFamily family_of(PolicyKind kind);
const std::vector<PolicyKind>& all_policy_kinds();

// Everything a policy may look at in one round. theta* stays inside the oracle.
struct RoundContext {
  long t = 1;
  const ArmPool* pool = nullptr;
  const Environment* env = nullptr;  // arm and key-term features
  const Spanner* spanner = nullptr;
  const FeedbackOracle* oracle = nullptr;
  long conversations = 0;  // floor(b(t)) - floor(b(t-1))
  double budget = 0.0;     // b(t)
  const Vector* revenues = nullptr;  // per pool position; MNL only
  std::uint64_t seed = 0;
};

struct RoundRecord {
  // Pool positions of the offered arms: a pair for dueling policies (one arm
  // repeated for single-arm baselines), the assortment for MNL policies.
  std::vector<Index> offered;
  // Key-term ids asked in each conversation.
  std::vector<std::vector<Index>> conversations;
  // Dueling: 1 when offered[0] won. MNL: chosen position in `offered`, -1 for
  // the outside option or an empty assortment.
  long outcome = 0;
  double alpha = 0.0;
  Index candidates = 0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;
  PolicyFamily family() const { return family_of(kind()); }
  virtual RoundRecord play_round(const RoundContext& ctx) = 0;
};

}  // namespace convduel

#endif  // CONVDUEL_POLICY_HPP_
