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

#ifndef CONVDUEL_GLM_CORE_HPP_
#define CONVDUEL_GLM_CORE_HPP_

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "convduel/common.hpp"
#include "convduel/link.hpp"

namespace convduel {

struct WeightTriple {
  Index arm;
  Index keyterm;
  double weight;
};

// Weighted bipartite graph between arms and key-terms, stored as a sparse
// N x K row-stochastic matrix.
class WeightGraph {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  WeightGraph() = default;

  // Throws StructuralError on out-of-range ids, negative weights, or an arm
  // whose weights do not sum to one within 1e-9.
  WeightGraph(Index num_arms, Index num_keyterms, const std::vector<WeightTriple>& triples);

  Index num_arms() const { return weights_.rows(); }
  Index num_keyterms() const { return weights_.cols(); }
  const Sparse& weights() const { return weights_; }

  // Column sums: total weight of every key-term.
  Vector keyterm_mass() const;

  // Triples in (arm, key-term) order.
  std::vector<WeightTriple> triples() const;

 private:
  Sparse weights_;
};

// Weighted mean of the features of arms related to key-term k. The result is
// not renormalized. Arm features are the rows of `arm_features`.
template <typename Derived>
VectorX<typename Derived::Scalar> keyterm_feature(const WeightGraph& graph,
                                                  const Eigen::MatrixBase<Derived>& arm_features,
                                                  Index k) {
  using Scalar = typename Derived::Scalar;
  if (arm_features.rows() != graph.num_arms()) {
    throw StructuralError("arm feature matrix does not match the weight graph");
  }
  if (k < 0 || k >= graph.num_keyterms()) throw StructuralError("key-term id out of range");
  VectorX<Scalar> acc = VectorX<Scalar>::Zero(arm_features.cols());
  Scalar mass(0);
  const auto& w = graph.weights();
  for (Index a = 0; a < w.outerSize(); ++a) {
    for (WeightGraph::Sparse::InnerIterator it(w, a); it; ++it) {
      if (it.col() != k || it.value() <= 0.0) continue;
      acc += Scalar(it.value()) * arm_features.row(a).transpose();
      mass += Scalar(it.value());
    }
  }
  if (mass <= Scalar(0)) {
    throw StructuralError("key-term " + std::to_string(k) + " has no related arm");
  }
  return acc / mass;
}

// All key-term features at once (K x d, row per key-term).
RowMatrix keyterm_features(const WeightGraph& graph, const RowMatrix& arm_features);

// Probability that the arm with features x_i beats the arm with features x_j.
template <typename DerivedT, typename DerivedI, typename DerivedJ>
typename DerivedT::Scalar duel_prob(const LinkFunction& link,
                                    const Eigen::MatrixBase<DerivedT>& theta,
                                    const Eigen::MatrixBase<DerivedI>& x_i,
                                    const Eigen::MatrixBase<DerivedJ>& x_j) {
  if (theta.size() != x_i.size() || theta.size() != x_j.size()) {
    throw StructuralError("duel_prob: dimension mismatch");
  }
  return link_eval(link, (x_i - x_j).dot(theta));
}

// Regularized Gram matrix with a maintained inverse and running log-determinant.
// Rank-one updates use Sherman-Morrison; every kRefactorEvery updates the
// inverse and log-determinant are recomputed from a Cholesky factorization.
template <typename Scalar>
class DesignMatrix {
 public:
  static constexpr int kRefactorEvery = 256;

  DesignMatrix() = default;
  DesignMatrix(Index dim, Scalar regularizer)
      : matrix_(MatrixX<Scalar>::Identity(dim, dim) * regularizer),
        inverse_(MatrixX<Scalar>::Identity(dim, dim) / regularizer),
        log_det_(Scalar(dim) * std::log(regularizer)),
        regularizer_(regularizer) {
    if (!(regularizer > Scalar(0))) throw DomainError("design matrix regularizer must be positive");
  }

  Index dim() const { return matrix_.rows(); }
  const MatrixX<Scalar>& matrix() const { return matrix_; }
  const MatrixX<Scalar>& inverse() const { return inverse_; }
  Scalar log_det() const { return log_det_; }
  Scalar regularizer() const { return regularizer_; }
  long updates() const { return updates_; }

  template <typename Derived>
  void rank_one_update(const Eigen::MatrixBase<Derived>& v) {
    if (v.size() != dim()) throw StructuralError("design update: dimension mismatch");
    const VectorX<Scalar> u = inverse_ * v;
    const Scalar denom = Scalar(1) + v.dot(u);
    matrix_.noalias() += v * v.transpose();
    inverse_.noalias() -= (u * u.transpose()) / denom;
    log_det_ += std::log(denom);
    if (++updates_ % kRefactorEvery == 0) refactor();
  }

  // Recompute inverse and log-determinant from scratch.
  void refactor() {
    Eigen::LLT<MatrixX<Scalar>> llt(matrix_);
    if (llt.info() != Eigen::Success) throw NumericalError("design matrix lost positive definiteness");
    inverse_ = llt.solve(MatrixX<Scalar>::Identity(dim(), dim()));
    log_det_ = Scalar(2) * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }

  template <typename Derived>
  Scalar mahalanobis_sq(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != dim()) throw StructuralError("mahalanobis: dimension mismatch");
    return std::max(Scalar(0), v.dot(inverse_ * v));
  }

 private:
  MatrixX<Scalar> matrix_;
  MatrixX<Scalar> inverse_;
  Scalar log_det_ = Scalar(0);
  Scalar regularizer_ = Scalar(1);
  long updates_ = 0;
};

using DesignMatrixd = DesignMatrix<double>;

// Value-returning form of DesignMatrix::rank_one_update.
template <typename Scalar, typename Derived>
DesignMatrix<Scalar> design_update(DesignMatrix<Scalar> m, const Eigen::MatrixBase<Derived>& v) {
  m.rank_one_update(v);
  return m;
}

// sqrt(v^T M^{-1} v).
template <typename Scalar, typename Derived>
Scalar mahalanobis(const DesignMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& v) {
  return std::sqrt(m.mahalanobis_sq(v));
}

}  // namespace convduel

#endif  // CONVDUEL_GLM_CORE_HPP_
