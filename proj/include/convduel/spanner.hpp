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

#ifndef CONVDUEL_SPANNER_HPP_
#define CONVDUEL_SPANNER_HPP_

#include <vector>

#include "convduel/common.hpp"

namespace convduel {

// A C-approximate barycentric spanner: d key-terms whose features form a basis
// in which every key-term feature has coordinates bounded by C in magnitude.
struct Spanner {
  std::vector<Index> member_ids;
  Matrix basis;  // d x d, column i is the feature of member_ids[i]
  double approx_factor = 2.0;
  long swaps = 0;

  Index dim() const { return basis.rows(); }
};

// Builds a spanner by determinant swapping, starting from the basis picked by
// column-pivoted elimination. Key-terms are scanned in id order; the first
// (key-term, slot) whose swap grows |det| by more than C is taken.
//
// Throws StructuralError if the features do not span R^d (the message names
// the achieved rank) and DomainError if C < 1.
Spanner build_spanner(const RowMatrix& keyterm_features, double approx_factor = 2.0);

// Coordinates of x in the spanner basis.
Vector spanner_coefficients(const Spanner& spanner, const Vector& x);

// Smallest eigenvalue of E[(x - y)(x - y)^T] with x, y drawn independently and
// uniformly from the spanner members.
double spanner_lambda_b(const Spanner& spanner);

// Smallest eigenvalue of E[x x^T] with x uniform over the spanner members.
double spanner_lambda_b_prime(const Spanner& spanner);

}  // namespace convduel

#endif  // CONVDUEL_SPANNER_HPP_
