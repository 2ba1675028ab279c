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

#ifndef CONVDUEL_RNG_HPP_
#define CONVDUEL_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "convduel/common.hpp"

namespace convduel {

// What a stream of random draws is used for. Each (seed, round, purpose)
// triple addresses an independent substream, so adding draws for one purpose
// never shifts the draws of another.
enum class Purpose : std::uint64_t {
  Environment = 1,
  Pool = 2,
  KeytermSelect = 3,
  KeytermFeedback = 4,
  ArmSelect = 5,
  ArmFeedback = 6,
  Diagnostics = 7,
};

std::uint64_t mix64(std::uint64_t x);

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t round, Purpose purpose);
  explicit RandomStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform on {0, ..., n - 1}.
  Index uniform_index(Index n);

  // k distinct values from {0, ..., n - 1} in draw order.
  std::vector<Index> sample_without_replacement(Index n, Index k);

  // Categorical draw with the given (non-negative, summing to ~1) weights.
  Index categorical(const Vector& probs);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace convduel

#endif  // CONVDUEL_RNG_HPP_
