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

#include "convduel/spanner.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

namespace convduel {

namespace {

constexpr double kRankTolerance = 1e-9;

Matrix gather_columns(const RowMatrix& features, const std::vector<Index>& ids) {
  Matrix basis(features.cols(), static_cast<Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    basis.col(static_cast<Index>(i)) = features.row(ids[i]).transpose();
  }
  return basis;
}

}  // namespace

Spanner build_spanner(const RowMatrix& keyterm_features, double approx_factor) {
  if (!(approx_factor >= 1.0)) throw DomainError("spanner approximation factor must be >= 1");
  const Index dim = keyterm_features.cols();
  const Index count = keyterm_features.rows();
  if (count == 0 || dim == 0) throw StructuralError("cannot build a spanner of an empty key-term set");

  Matrix columns = keyterm_features.transpose();
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(kRankTolerance);
  const Index rank = qr.rank();
  if (rank < dim) {
    throw StructuralError("key-term features span rank " + std::to_string(rank) + " < d = " +
                          std::to_string(dim));
  }

  Spanner out;
  out.approx_factor = approx_factor;
  const auto& perm = qr.colsPermutation().indices();
  for (Index i = 0; i < dim; ++i) out.member_ids.push_back(perm(i));
  out.basis = gather_columns(keyterm_features, out.member_ids);

  // Replacing slot i by x scales |det| by |c_i| where c solves basis * c = x.
  for (;;) {
    const Eigen::PartialPivLU<Matrix> lu(out.basis);
    const Matrix coeffs = lu.solve(columns);
    bool swapped = false;
    for (Index k = 0; k < count && !swapped; ++k) {
      for (Index i = 0; i < dim; ++i) {
        if (std::abs(coeffs(i, k)) > approx_factor) {
          out.member_ids[static_cast<std::size_t>(i)] = k;
          out.basis.col(i) = columns.col(k);
          ++out.swaps;
          swapped = true;
          break;
        }
      }
    }
    if (!swapped) break;
  }
  return out;
}

Vector spanner_coefficients(const Spanner& spanner, const Vector& x) {
  if (x.size() != spanner.dim()) throw StructuralError("spanner_coefficients: dimension mismatch");
  const Eigen::FullPivLU<Matrix> lu(spanner.basis);
  if (!lu.isInvertible()) throw NumericalError("spanner basis is singular");
  Vector c = lu.solve(x);
  if (!c.allFinite()) throw NumericalError("spanner coefficient solve produced non-finite values");
  return c;
}

double spanner_lambda_b(const Spanner& spanner) {
  const Index d = spanner.dim();
  const Index members = spanner.basis.cols();
  Matrix sigma = Matrix::Zero(d, d);
  for (Index i = 0; i < members; ++i) {
    for (Index j = 0; j < members; ++j) {
      const Vector diff = spanner.basis.col(i) - spanner.basis.col(j);
      sigma.noalias() += diff * diff.transpose();
    }
  }
  sigma /= static_cast<double>(members * members);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

double spanner_lambda_b_prime(const Spanner& spanner) {
  const Matrix second = spanner.basis * spanner.basis.transpose() /
                        static_cast<double>(spanner.basis.cols());
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(second, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

}  // namespace convduel
