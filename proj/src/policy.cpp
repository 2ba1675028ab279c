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

#include "convduel/policy.hpp"

#include <array>
#include <utility>

namespace convduel {

namespace {

constexpr std::array<std::pair<PolicyKind, std::string_view>, 11> kNames{{
    {PolicyKind::ConDuel, "conduel"},
    {PolicyKind::ConDuelRandom, "conduel-random"},
    {PolicyKind::ConDuelMaxInp, "conduel-maxinp"},
    {PolicyKind::MaxInp, "maxinp"},
    {PolicyKind::RandomOpt, "random-opt"},
    {PolicyKind::RconucbPosNeg, "rconucb-posneg"},
    {PolicyKind::RconucbDiff, "rconucb-diff"},
    {PolicyKind::ConMnl, "conmnl"},
    {PolicyKind::ConMnlUcb, "conmnl-ucb"},
    {PolicyKind::ConMnlRandom, "conmnl-random"},
    {PolicyKind::UcbMnl, "ucb-mnl"},
}};

}  // namespace

std::string_view to_string(PolicyKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

PolicyFamily family_of(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ConMnl:
    case PolicyKind::ConMnlUcb:
    case PolicyKind::ConMnlRandom:
    case PolicyKind::UcbMnl:
      return PolicyFamily::Mnl;
    default:
      return PolicyFamily::Dueling;
  }
}

const std::vector<PolicyKind>& all_policy_kinds() {
  static const std::vector<PolicyKind> kinds = [] {
    std::vector<PolicyKind> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return kinds;
}

}  // namespace convduel
