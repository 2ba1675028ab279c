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

#ifndef CONVDUEL_MNL_HPP_
#define CONVDUEL_MNL_HPP_

#include <vector>

#include "convduel/common.hpp"

namespace convduel {

// MNL choice probabilities for the rows of `offered` plus the outside option.
// Entry i < n is item i; entry n is the outside option.
template <typename DerivedX, typename DerivedT>
VectorX<typename DerivedT::Scalar> mnl_probs(const Eigen::MatrixBase<DerivedT>& theta,
                                             const Eigen::MatrixBase<DerivedX>& offered) {
  using Scalar = typename DerivedT::Scalar;
  if (offered.rows() == 0) throw StructuralError("mnl_probs needs at least one offered item");
  if (offered.cols() != theta.size()) throw StructuralError("mnl_probs: dimension mismatch");
  const Index n = offered.rows();
  VectorX<Scalar> logits(n + 1);
  logits.head(n) = offered * theta;
  logits(n) = Scalar(0);
  const Scalar shift = logits.maxCoeff();
  VectorX<Scalar> p = (logits.array() - shift).exp().matrix();
  return p / p.sum();
}

// sum_{i in C} r_i exp(u_i) / (1 + sum_{i in C} exp(u_i)), evaluated stably.
// `items` index into `utilities` and `revenues`. Empty set gives 0.
double assortment_value(const Vector& utilities, const Vector& revenues,
                        const std::vector<Index>& items);

// Expected revenue R(C, theta) = sum_{j in C} r_j p_j(C, theta). `items` are
// rows of `features`.
double expected_revenue(const std::vector<Index>& items, const RowMatrix& features,
                        const Vector& theta, const Vector& revenues);

// Exact maximizer of assortment_value over |C| <= max_size, by bisection on
// the revenue threshold. Items are returned ascending; the empty set is
// returned when no revenue is positive.
std::vector<Index> optimal_assortment(const Vector& utilities, const Vector& revenues,
                                      Index max_size);

}  // namespace convduel

#endif  // CONVDUEL_MNL_HPP_
