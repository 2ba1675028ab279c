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

#include "convduel/glm_core.hpp"

#include <cmath>

namespace convduel {

std::string_view to_string(LinkKind kind) {
  return kind == LinkKind::Sigmoid ? "sigmoid" : "clamped-linear";
}

LinkKind parse_link_kind(std::string_view name) {
  if (name == "sigmoid") return LinkKind::Sigmoid;
  if (name == "clamped-linear" || name == "linear") return LinkKind::ClampedLinear;
  throw ConfigError("unknown link function '" + std::string(name) + "'");
}

WeightGraph::WeightGraph(Index num_arms, Index num_keyterms,
                         const std::vector<WeightTriple>& triples) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(triples.size());
  for (const auto& t : triples) {
    if (t.arm < 0 || t.arm >= num_arms || t.keyterm < 0 || t.keyterm >= num_keyterms) {
      throw StructuralError("weight triple references an id out of range");
    }
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw StructuralError("weight graph entries must be finite and non-negative");
    }
    entries.emplace_back(t.arm, t.keyterm, t.weight);
  }
  weights_.resize(num_arms, num_keyterms);
  weights_.setFromTriplets(entries.begin(), entries.end());
  weights_.makeCompressed();

  for (Index a = 0; a < num_arms; ++a) {
    double sum = 0.0;
    for (Sparse::InnerIterator it(weights_, a); it; ++it) sum += it.value();
    if (std::abs(sum - 1.0) > 1e-9) {
      throw StructuralError("weights of arm " + std::to_string(a) + " sum to " +
                            std::to_string(sum) + ", expected 1");
    }
  }
}

Vector WeightGraph::keyterm_mass() const {
  Vector mass = Vector::Zero(num_keyterms());
  for (Index a = 0; a < weights_.outerSize(); ++a) {
    for (Sparse::InnerIterator it(weights_, a); it; ++it) mass(it.col()) += it.value();
  }
  return mass;
}

std::vector<WeightTriple> WeightGraph::triples() const {
  std::vector<WeightTriple> out;
  out.reserve(weights_.nonZeros());
  for (Index a = 0; a < weights_.outerSize(); ++a) {
    for (Sparse::InnerIterator it(weights_, a); it; ++it) {
      out.push_back({a, it.col(), it.value()});
    }
  }
  return out;
}

RowMatrix keyterm_features(const WeightGraph& graph, const RowMatrix& arm_features) {
  if (arm_features.rows() != graph.num_arms()) {
    throw StructuralError("arm feature matrix does not match the weight graph");
  }
  const Vector mass = graph.keyterm_mass();
  for (Index k = 0; k < mass.size(); ++k) {
    if (!(mass(k) > 0.0)) {
      throw StructuralError("key-term " + std::to_string(k) + " has no related arm");
    }
  }
  RowMatrix sums = graph.weights().transpose() * arm_features;
  return mass.cwiseInverse().asDiagonal() * sums;
}

}  // namespace convduel
