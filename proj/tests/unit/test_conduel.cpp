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
#include <numeric>
#include <set>

#include "doctest.h"
#include "convduel/conduel.hpp"
#include "convduel/envsim.hpp"
#include "convduel/experiment.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace convduel;

namespace {

const LinkFunction kSigmoid{LinkKind::Sigmoid};

DesignMatrixd random_design(Index d, RandomStream& rng) {
  DesignMatrixd m(d, 1.0);
  for (int i = 0; i < 3 * d; ++i) m.rank_one_update(test::random_vector(d, rng));
  return m;
}

// Small environment: N arms, K key-terms each tied to a few arms.
Environment toy_environment(Index n, Index k, Index d, std::uint64_t seed) {
  RandomStream rng(seed);
  RowMatrix arms = test::random_unit_rows(n, d, rng);
  std::vector<WeightTriple> triples;
  for (Index a = 0; a < n; ++a) {
    triples.push_back({a, a % k, 0.5});
    triples.push_back({a, (a * 7 + 3) % k == a % k ? (a + 1) % k : (a * 7 + 3) % k, 0.5});
  }
  RowMatrix users = test::random_unit_rows(2, d, rng);
  return make_environment(kSigmoid, arms, WeightGraph(n, k, triples), users);
}

}  // namespace

TEST_SUITE("conduel") {
  TEST_CASE("max-informative pair with identity design is the farthest pair") {
    RowMatrix f(4, 2);
    f << 0, 0, 1, 0, 0.2, 0.1, -2, 0.5;
    const DesignMatrixd id(2, 1.0);
    CHECK(max_informative_pair(f, id) == std::pair<Index, Index>{1, 3});
  }

  TEST_CASE("max-informative pair matches enumeration") {
    RandomStream rng(107);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = trial % 2 == 0 ? 5 : 8;
      const RowMatrix f = test::random_unit_rows(n, 3, rng);
      const DesignMatrixd m = random_design(3, rng);
      std::pair<Index, Index> want{0, 1};
      double best = -1;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
          const Vector v = f.row(i) - f.row(j);
          const double val = v.dot(m.matrix().llt().solve(v));
          if (val > best + 1e-12) {
            best = val;
            want = {i, j};
          }
        }
      CHECK(max_informative_pair(f, m) == want);
    }
  }

  TEST_CASE("max-informative pair is invariant to scaling the design") {
    RandomStream rng(109);
    const RowMatrix f = test::random_unit_rows(10, 3, rng);
    DesignMatrixd m(3, 1.0);
    DesignMatrixd m7(3, 7.0);
    for (int i = 0; i < 6; ++i) {
      const Vector v = test::random_vector(3, rng);
      m.rank_one_update(v);
      m7.rank_one_update(std::sqrt(7.0) * v);
    }
    CHECK(max_informative_pair(f, m) == max_informative_pair(f, m7));
  }

  TEST_CASE("key-term pair selection per policy") {
    RandomStream rng(113);
    const RowMatrix keyterms = test::random_unit_rows(12, 3, rng);
    const Spanner sp = build_spanner(keyterms);
    const std::set<Index> members(sp.member_ids.begin(), sp.member_ids.end());
    const DesignMatrixd id(3, 1.0);
    for (int i = 0; i < 200; ++i) {
      const auto [a, b] = select_keyterm_pair(PolicyKind::ConDuel, sp, keyterms, id, rng);
      CHECK(members.count(a) == 1);
      CHECK(members.count(b) == 1);
    }
    std::set<Index> seen;
    for (int i = 0; i < 400; ++i) {
      const auto [a, b] = select_keyterm_pair(PolicyKind::ConDuelRandom, sp, keyterms, id, rng);
      seen.insert(a);
      seen.insert(b);
    }
    CHECK(seen.size() == 12);
    CHECK(select_keyterm_pair(PolicyKind::ConDuelMaxInp, sp, keyterms, id, rng) == max_informative_pair(keyterms, id));
    CHECK_THROWS_AS(select_keyterm_pair(PolicyKind::MaxInp, sp, keyterms, id, rng), StructuralError);
    CHECK_THROWS_AS(select_keyterm_pair(PolicyKind::ConDuel, sp, RowMatrix(0, 3), id, rng), StructuralError);
  }

  TEST_CASE("candidate set limits") {
    RandomStream rng(127);
    const RowMatrix pool = test::random_unit_rows(20, 4, rng);
    const Vector theta = test::random_unit(4, rng);
    const DesignMatrixd m = random_design(4, rng);
    std::vector<Index> all(20);
    std::iota(all.begin(), all.end(), Index{0});
    CHECK(build_candidate_set(pool, theta, m, 1e6) == all);
    Index best = 0;
    (pool * theta).maxCoeff(&best);
    CHECK(build_candidate_set(pool, theta, m, 0.0) == std::vector<Index>{best});
    CHECK_THROWS_AS(build_candidate_set(pool, theta, m, -1.0), DomainError);
  }

  TEST_CASE("candidate set matches the double loop") {
    RandomStream rng(131);
    for (int trial = 0; trial < 100; ++trial) {
      const RowMatrix pool = test::random_unit_rows(6, 2, rng);
      const Vector theta = test::random_unit(2, rng) * rng.uniform01();
      const DesignMatrixd m = random_design(2, rng);
      std::vector<Index> want;
      for (Index a = 0; a < 6; ++a) {
        bool keep = true;
        for (Index b = 0; b < 6; ++b) {
          if (b == a) continue;
          const Vector v = pool.row(a) - pool.row(b);
          keep = keep && v.dot(theta) + 0.3 * std::sqrt(v.dot(m.matrix().llt().solve(v))) > 0;
        }
        if (keep) want.push_back(a);
      }
      CHECK(build_candidate_set(pool, theta, m, 0.3) == want);
    }
  }

  TEST_CASE("candidate set is permutation invariant") {
    RandomStream rng(137);
    const RowMatrix pool = test::random_unit_rows(15, 3, rng);
    const Vector theta = test::random_unit(3, rng);
    const DesignMatrixd m = random_design(3, rng);
    std::vector<Index> perm(15);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    RowMatrix shuffled(15, 3);
    for (Index i = 0; i < 15; ++i) shuffled.row(i) = pool.row(perm[static_cast<std::size_t>(i)]);
    std::set<Index> a;
    for (Index i : build_candidate_set(pool, theta, m, 0.4)) a.insert(i);
    std::set<Index> b;
    for (Index i : build_candidate_set(shuffled, theta, m, 0.4)) b.insert(perm[static_cast<std::size_t>(i)]);
    CHECK(a == b);
  }

  TEST_CASE("best arm survives when the radius covers the estimation error") {
    RandomStream rng(139);
    for (int trial = 0; trial < 50; ++trial) {
      const RowMatrix pool = test::random_unit_rows(20, 3, rng);
      const Vector theta_star = test::random_unit(3, rng);
      const DesignMatrixd m = random_design(3, rng);
      const Vector theta = theta_star + 0.2 * test::random_unit(3, rng);
      // alpha = ||theta - theta*||_M bounds every |v^T (theta - theta*)| by alpha ||v||_{M^-1}.
      const Vector e = theta - theta_star;
      const double alpha = std::sqrt(e.dot(m.matrix() * e)) * (1 + 1e-9);
      Index best = 0;
      (pool * theta_star).maxCoeff(&best);
      const auto c = build_candidate_set(pool, theta, m, alpha);
      CHECK(std::find(c.begin(), c.end(), best) != c.end());
    }
  }

  TEST_CASE("arm pair selection") {
    RandomStream rng(149);
    RowMatrix line(3, 2);
    line << -1, 0, 0.1, 0, 1, 0;
    const DesignMatrixd id(2, 1.0);
    CHECK(select_arm_pair({0, 1, 2}, line, id, PairMode::FullMaxInp, rng) == std::pair<Index, Index>{0, 2});
    CHECK(select_arm_pair({1}, line, id, PairMode::SampledFirst, rng) == std::pair<Index, Index>{1, 1});
    CHECK_THROWS_AS(select_arm_pair({}, line, id, PairMode::Random, rng), StructuralError);

    const RowMatrix pool = test::random_unit_rows(12, 3, rng);
    const DesignMatrixd m = random_design(3, rng);
    const std::vector<Index> cands{0, 2, 3, 5, 6, 8, 9, 11};
    // FullMaxInp: all 28 candidate pairs.
    std::pair<Index, Index> want{0, 2};
    double best = -1;
    for (std::size_t i = 0; i < cands.size(); ++i)
      for (std::size_t j = i + 1; j < cands.size(); ++j) {
        const Vector v = pool.row(cands[i]) - pool.row(cands[j]);
        const double val = m.mahalanobis_sq(v);
        if (val > best) {
          best = val;
          want = {cands[i], cands[j]};
        }
      }
    CHECK(select_arm_pair(cands, pool, m, PairMode::FullMaxInp, rng) == want);

    for (int i = 0; i < 50; ++i) {
      const auto [a, b] = select_arm_pair(cands, pool, m, PairMode::SampledFirst, rng);
      double top = -1;
      for (Index c : cands) top = std::max(top, m.mahalanobis_sq(Vector(pool.row(c) - pool.row(a))));
      CHECK(m.mahalanobis_sq(Vector(pool.row(b) - pool.row(a))) == top);
      const auto [x, y] = select_arm_pair(cands, pool, m, PairMode::Random, rng);
      CHECK(x != y);
      CHECK(std::find(cands.begin(), cands.end(), x) != cands.end());
      CHECK(std::find(cands.begin(), cands.end(), y) != cands.end());
    }
  }

  TEST_CASE("round bookkeeping") {
    const Environment env = toy_environment(20, 6, 3, 151);
    const Spanner sp = build_spanner(env.keyterms);
    const FeedbackOracle oracle(env, 0);
    const Schedule sched = Schedule::linear_floor(3);
    DuelConfig cfg;
    DuelPolicy conduel(PolicyKind::ConDuel, 3, kSigmoid, cfg);
    DuelPolicy maxinp(PolicyKind::MaxInp, 3, kSigmoid, cfg);
    CHECK(conduel.design().matrix()(0, 0) == doctest::Approx(1.0 / kSigmoid.kappa1()));
    RandomStream pool_rng(7);
    for (long t = 1; t <= 120; ++t) {
      const ArmPool pool = sample_pool(env, t, 8, pool_rng);
      RoundContext ctx{t, &pool, &env, &sp, &oracle, sched.conversations(t), sched.budget(t), nullptr, 3};
      const auto before = conduel.history().count(FeedbackLevel::KeyTerm);
      const RoundRecord r = conduel.play_round(ctx);
      CHECK(conduel.history().count(FeedbackLevel::KeyTerm) - before == ctx.conversations);
      CHECK(static_cast<long>(r.conversations.size()) == ctx.conversations);
      (void)maxinp.play_round(ctx);
    }
    CHECK(conduel.history().count(FeedbackLevel::KeyTerm) == static_cast<Index>(std::floor(sched.budget(120))));
    CHECK(conduel.history().count(FeedbackLevel::Arm) == 120);
    CHECK(maxinp.history().count(FeedbackLevel::KeyTerm) == 0);
    CHECK(conduel.design().updates() == 120 + 6);
    CHECK(conduel.estimate().theta_proj.norm() <= 1 + 1e-6);
  }

  TEST_CASE("ConDuel matches a straight-line replay") {
    // Re-derives every round from scratch: design rebuilt from the full diff
    // list, candidate set by double loop, SampledFirst written out.
    const Environment env = toy_environment(16, 5, 2, 157);
    const Spanner sp = build_spanner(env.keyterms);
    const FeedbackOracle oracle(env, 1);
    const Schedule sched = Schedule::linear_floor(10);
    DuelConfig cfg;
    cfg.alpha_scale = 0.05;
    DuelPolicy policy(PolicyKind::ConDuel, 2, kSigmoid, cfg);
    const std::uint64_t seed = 17;
    InteractionHistory hist(2);
    Vector warm = Vector::Zero(2);
    RandomStream pool_rng(19);
    const double k1 = kSigmoid.kappa1();
    for (long t = 1; t <= 150; ++t) {
      const ArmPool pool = sample_pool(env, t, 6, pool_rng);
      RoundContext ctx{t, &pool, &env, &sp, &oracle, sched.conversations(t), sched.budget(t), nullptr, seed};
      const RoundRecord got = policy.play_round(ctx);

      RandomStream sel(seed, static_cast<std::uint64_t>(t), Purpose::KeytermSelect);
      RandomStream kfb(seed, static_cast<std::uint64_t>(t), Purpose::KeytermFeedback);
      for (long c = 0; c < ctx.conversations; ++c) {
        const Index a = sp.member_ids[static_cast<std::size_t>(sel.uniform_index(2))];
        const Index b = sp.member_ids[static_cast<std::size_t>(sel.uniform_index(2))];
        REQUIRE(got.conversations[static_cast<std::size_t>(c)] == std::vector<Index>{a, b});
        const Vector d = env.keyterms.row(a) - env.keyterms.row(b);
        hist.append(d, kfb.bernoulli(link_eval(kSigmoid, d.dot(env.theta_star(1)))), FeedbackLevel::KeyTerm);
      }
      Matrix m = Matrix::Identity(2, 2) / k1;
      for (Index s = 0; s < hist.size(); ++s) m += hist.diffs().row(s).transpose() * hist.diffs().row(s);
      DesignMatrixd design(2, 1.0 / k1);
      for (Index s = 0; s < hist.size(); ++s) design.rank_one_update(hist.diffs().row(s).transpose());
      MleOptions opts;
      opts.initial = warm;
      const ThetaEstimate est = mle_fit(hist, 1.0, kSigmoid, opts, &design);
      warm = est.theta_raw;
      DuelRadiusParams rp;
      rp.kappa1 = k1;
      const double alpha = 0.05 * alpha_duel(static_cast<double>(t), sched.budget(t), 2, rp);
      CHECK(got.alpha == doctest::Approx(alpha).epsilon(1e-12));
      std::vector<Index> cands;
      for (Index a = 0; a < pool.size(); ++a) {
        bool keep = true;
        for (Index b = 0; b < pool.size(); ++b) {
          if (b == a) continue;
          const Vector v = pool.features.row(a) - pool.features.row(b);
          keep = keep && v.dot(est.theta_proj) + alpha * std::sqrt(v.dot(m.llt().solve(v))) > 0;
        }
        if (keep) cands.push_back(a);
      }
      REQUIRE(got.candidates == static_cast<Index>(cands.size()));
      RandomStream arm(seed, static_cast<std::uint64_t>(t), Purpose::ArmSelect);
      Index first = cands.front();
      Index second = first;
      if (cands.size() > 1) {
        first = cands[static_cast<std::size_t>(arm.uniform_index(static_cast<Index>(cands.size())))];
        double best = -1;
        for (Index c : cands) {
          const Vector v = pool.features.row(c) - pool.features.row(first);
          const double val = v.dot(m.llt().solve(v));
          if (val > best) {
            best = val;
            second = c;
          }
        }
      }
      REQUIRE(got.offered == std::vector<Index>{first, second});
      RandomStream afb(seed, static_cast<std::uint64_t>(t), Purpose::ArmFeedback);
      const Vector d = pool.features.row(first) - pool.features.row(second);
      const bool won = afb.bernoulli(link_eval(kSigmoid, d.dot(env.theta_star(1))));
      CHECK(got.outcome == (won ? 1 : 0));
      hist.append(d, won, FeedbackLevel::Arm);
    }
    CHECK((policy.estimate().theta_raw - warm).norm() <= 1e-9);
  }

  TEST_CASE("Rconucb conversion of key-term feedback") {
    const Environment env = toy_environment(20, 6, 3, 163);
    const FeedbackOracle oracle(env, 0);
    RconucbConfig cfg;
    RconucbPolicy posneg(PolicyKind::RconucbPosNeg, 3, cfg);
    RconucbPolicy diff(PolicyKind::RconucbDiff, 3, cfg);
    RandomStream pool_rng(3);
    long total = 0;
    Matrix gram = Matrix::Identity(3, 3) * cfg.keyterm_ridge;
    Vector target = Vector::Zero(3);
    for (long t = 1; t <= 40; ++t) {
      const ArmPool pool = sample_pool(env, t, 8, pool_rng);
      const long conv = t % 3;
      RoundContext ctx{t, &pool, &env, nullptr, &oracle, conv, 0.0, nullptr, 5};
      const auto r = diff.play_round(ctx);
      (void)posneg.play_round(ctx);
      total += conv;
      // Replay the key-term duels to rebuild the ridge problem for Diff.
      RandomStream kfb(5, static_cast<std::uint64_t>(t), Purpose::KeytermFeedback);
      for (const auto& pair : r.conversations) {
        const Vector x1 = env.keyterms.row(pair[0]).transpose();
        const Vector x2 = env.keyterms.row(pair[1]).transpose();
        const bool first = oracle.duel(x1, x2, kfb);
        const Vector v = first ? Vector(x1 - x2) : Vector(x2 - x1);
        gram += v * v.transpose();
        target += v;  // label 1
      }
      CHECK(r.offered.size() == 2);
      CHECK(r.offered[0] == r.offered[1]);
    }
    CHECK(posneg.keyterm_observations() == 2 * total);
    CHECK(diff.keyterm_observations() == total);
    CHECK((diff.keyterm_theta() - gram.ldlt().solve(target)).norm() <= 1e-10);
  }

  TEST_CASE("Rconucb variants coincide without conversations") {
    const Environment env = toy_environment(20, 6, 3, 167);
    const FeedbackOracle oracle(env, 1);
    RconucbPolicy a(PolicyKind::RconucbPosNeg, 3, {});
    RconucbPolicy b(PolicyKind::RconucbDiff, 3, {});
    RandomStream pool_rng(9);
    for (long t = 1; t <= 100; ++t) {
      const ArmPool pool = sample_pool(env, t, 10, pool_rng);
      RoundContext ctx{t, &pool, &env, nullptr, &oracle, 0, 0.0, nullptr, 2};
      const auto ra = a.play_round(ctx);
      const auto rb = b.play_round(ctx);
      CHECK(ra.offered == rb.offered);
      CHECK(ra.outcome == rb.outcome);
    }
    CHECK(a.arm_theta() == b.arm_theta());
    CHECK_THROWS_AS(RconucbPolicy(PolicyKind::ConDuel, 3, {}), ConfigError);
  }
}
