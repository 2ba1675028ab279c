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

#include "convduel/rng.hpp"

#include <numeric>

namespace convduel {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t round, Purpose purpose)
    : engine_(mix64(mix64(mix64(seed) ^ round) ^ static_cast<std::uint64_t>(purpose))) {}

Index RandomStream::uniform_index(Index n) {
  if (n <= 0) throw StructuralError("uniform_index over an empty range");
  return std::uniform_int_distribution<Index>(0, n - 1)(engine_);
}

std::vector<Index> RandomStream::sample_without_replacement(Index n, Index k) {
  if (k > n || k < 0) throw StructuralError("cannot sample more items than available");
  // Partial Fisher-Yates over an index array.
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const Index j = i + uniform_index(n - i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

Index RandomStream::categorical(const Vector& probs) {
  const double u = uniform01();
  double acc = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    acc += probs(i);
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

}  // namespace convduel
