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


#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "convduel/envsim.hpp"
#include "convduel/spanner.hpp"
#include "test_util.hpp"

using namespace convduel;

namespace {

double abs_det(const RowMatrix& features, const std::vector<Index>& ids) {
  Matrix b(features.cols(), static_cast<Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) b.col(static_cast<Index>(i)) = features.row(ids[i]).transpose();
  return std::abs(b.determinant());
}

// Largest |det| over all d-subsets of the rows.
double max_subset_det(const RowMatrix& features) {
  const Index n = features.rows();
  const Index d = features.cols();
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + d, true);
  double best = 0.0;
  do {
    std::vector<Index> ids;
    for (Index i = 0; i < n; ++i)
      if (pick[static_cast<std::size_t>(i)]) ids.push_back(i);
    best = std::max(best, abs_det(features, ids));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST_SUITE("spanner") {
  TEST_CASE("standard basis with duplicates") {
    RowMatrix f(5, 3);
    f << 1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0;
    const Spanner s = build_spanner(f);
    std::vector<Index> ids = s.member_ids;
    REQUIRE(ids.size() == 3);
    CHECK(std::abs(s.basis.determinant()) == doctest::Approx(1.0));
    for (Index k = 0; k < f.rows(); ++k) {
      const Vector c = spanner_coefficients(s, f.row(k).transpose());
      CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("two-dimensional instance with a diagonal feature") {
    RowMatrix f(3, 2);
    f << 1, 0, 0, 1, 3, 3;
    f.row(2).normalize();
    const Spanner s = build_spanner(f);
    for (Index k = 0; k < 3; ++k) {
      CHECK(spanner_coefficients(s, f.row(k).transpose()).cwiseAbs().maxCoeff() <= 2.0 + 1e-6);
    }
  }

  TEST_CASE("coefficients of members and sums") {
    RandomStream rng(3);
    const RowMatrix f = test::random_unit_rows(30, 4, rng);
    const Spanner s = build_spanner(f);
    for (Index i = 0; i < 4; ++i) {
      const Vector c = spanner_coefficients(s, s.basis.col(i));
      CHECK((c - Vector::Unit(4, i)).norm() <= 1e-12);
    }
    const Vector c = spanner_coefficients(s, s.basis.col(0) + s.basis.col(1));
    Vector want = Vector::Zero(4);
    want << 1, 1, 0, 0;
    CHECK((c - want).norm() <= 1e-12);
    CHECK_THROWS_AS(spanner_coefficients(s, Vector::Zero(3)), StructuralError);
  }

  TEST_CASE("determinant guarantee against exhaustive subsets") {
    RandomStream rng(41);
    for (int trial = 0; trial < 25; ++trial) {
      const Index d = 2 + trial % 3;
      const Index k = 6 + trial % 7;  // up to 12
      const RowMatrix f = test::random_unit_rows(k, d, rng);
      const Spanner s = build_spanner(f);
      REQUIRE(static_cast<Index>(s.member_ids.size()) == d);
      const double got = abs_det(f, s.member_ids);
      CHECK(got * std::pow(2.0, static_cast<double>(d)) >= max_subset_det(f) * (1 - 1e-12));
      for (Index r = 0; r < k; ++r) {
        CHECK(spanner_coefficients(s, f.row(r).transpose()).cwiseAbs().maxCoeff() <= 2.0 + 1e-6);
      }
    }
  }

  TEST_CASE("exact spanner with C = 1 on small sets") {
    RandomStream rng(43);
    const RowMatrix f = test::random_unit_rows(9, 3, rng);
    const Spanner s = build_spanner(f, 1.0);
    CHECK(abs_det(f, s.member_ids) >= max_subset_det(f) * (1 - 1e-9));
  }

  TEST_CASE("rank-deficient sets are rejected with the achieved rank") {
    RowMatrix f(4, 3);
    f << 1, 0, 0, 0, 1, 0, 1, 1, 0, 2, -1, 0;
    try {
      (void)build_spanner(f);
      FAIL("expected StructuralError");
    } catch (const StructuralError& e) {
      CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
    }
    CHECK_THROWS_AS(build_spanner(RowMatrix(0, 3)), StructuralError);
    CHECK_THROWS_AS(build_spanner(f, 0.5), DomainError);
  }

  TEST_CASE("deterministic for a fixed input order") {
    RandomStream rng(47);
    const RowMatrix f = test::random_unit_rows(200, 6, rng);
    CHECK(build_spanner(f).member_ids == build_spanner(f).member_ids);
  }

  TEST_CASE("appending convex combinations of members keeps the coefficient bound") {
    RandomStream rng(53);
    for (int trial = 0; trial < 20; ++trial) {
      const RowMatrix f = test::random_unit_rows(25, 4, rng);
      const Spanner s = build_spanner(f);
      RowMatrix g(f.rows() + 10, f.cols());
      g.topRows(f.rows()) = f;
      for (Index r = 0; r < 10; ++r) {
        Vector w(4);
        for (Index i = 0; i < 4; ++i) w(i) = rng.uniform01();
        w /= w.sum();
        g.row(f.rows() + r) = (s.basis * w).transpose();
      }
      const Spanner t = build_spanner(g);
      CHECK(t.member_ids == s.member_ids);
    }
  }

  TEST_CASE("lambda_B of the standard basis") {
    // Over the 4 ordered pairs of {e1, e2}: Sigma = [[.5,-.5],[-.5,.5]] with
    // eigenvalues {0, 1}; the difference distribution never leaves span(e1-e2).
    Spanner s;
    s.member_ids = {0, 1};
    s.basis = Matrix::Identity(2, 2);
    CHECK(spanner_lambda_b(s) == doctest::Approx(0.0));
    CHECK(spanner_lambda_b_prime(s) == doctest::Approx(0.5));

    Spanner one;
    one.member_ids = {0};
    one.basis = Matrix::Ones(1, 1);
    CHECK(spanner_lambda_b(one) == 0.0);
  }

  TEST_CASE("lambda_B bounded by twice the member covariance spectrum") {
    RandomStream rng(59);
    for (int trial = 0; trial < 20; ++trial) {
      const RowMatrix f = test::random_unit_rows(40, 5, rng);
      const Spanner s = build_spanner(f);
      const Vector mean = s.basis.rowwise().mean();
      const Matrix centered = s.basis.colwise() - mean;
      const Matrix cov = centered * centered.transpose() / static_cast<double>(s.basis.cols());
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
      // Sigma equals exactly 2 * cov, so lambda_B = 2 * lambda_min(cov).
      CHECK(spanner_lambda_b(s) == doctest::Approx(2.0 * std::max(0.0, eig.eigenvalues().minCoeff())).epsilon(1e-9));
      CHECK(spanner_lambda_b(s) <= 2.0 * eig.eigenvalues().maxCoeff() + 1e-12);
    }
  }

  TEST_CASE("synthetic default environment spanner") {
    SyntheticConfig cfg;
    cfg.num_users = 5;
    cfg.num_arms = 5000;
    cfg.num_keyterms = 500;
    const Environment env = gen_synthetic(cfg, 1);
    const Spanner s = build_spanner(env.keyterms);
    for (Index k = 0; k < env.num_keyterms(); ++k) {
      CHECK(spanner_coefficients(s, env.keyterms.row(k).transpose()).cwiseAbs().maxCoeff() <= 2.0 + 1e-6);
    }
    CHECK(spanner_lambda_b_prime(s) > 0.0);
  }
}
