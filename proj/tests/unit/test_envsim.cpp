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


#include <cmath>
#include <numeric>

#include "doctest.h"
#include "convduel/envsim.hpp"
#include "convduel/experiment.hpp"
#include "convduel/mnl.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace convduel;

namespace {

const LinkFunction kSigmoid{LinkKind::Sigmoid};

// Number of standard deviations between an empirical rate and p.
double z_score(long hits, long n, double p) {
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
  const double rate = static_cast<double>(hits) / static_cast<double>(n);
  return sd == 0.0 ? (rate == p ? 0.0 : 1e9) : std::abs(rate - p) / sd;
}

SyntheticConfig small_synth() {
  SyntheticConfig cfg;
  cfg.num_users = 4;
  cfg.num_keyterms = 40;
  cfg.num_arms = 300;
  cfg.dim = 5;
  return cfg;
}

}  // namespace

TEST_SUITE("envsim") {
  TEST_CASE("synthetic generator contract") {
    const SyntheticConfig defaults;
    CHECK(defaults.num_users == 200);
    CHECK(defaults.num_keyterms == 500);
    CHECK(defaults.num_arms == 5000);
    CHECK(defaults.dim == 10);
    CHECK(defaults.max_arms_per_keyterm == 10);

    const Environment env = gen_synthetic(small_synth(), 9);
    CHECK(env.num_arms() == 300);
    CHECK(env.num_keyterms() == 40);
    for (Index a = 0; a < env.num_arms(); ++a) CHECK(std::abs(env.arms.row(a).norm() - 1.0) <= 1e-12);
    for (Index u = 0; u < env.num_users(); ++u) CHECK(std::abs(env.theta_star(u).norm() - 1.0) <= 1e-9);
    Vector row_sums = Vector::Zero(env.num_arms());
    for (const auto& tr : env.graph.triples()) row_sums(tr.arm) += tr.weight;
    CHECK((row_sums.array() - 1.0).abs().maxCoeff() <= 1e-9);
    for (Index k = 0; k < env.num_keyterms(); ++k) CHECK(env.keyterms.row(k).norm() <= 1.0 + 1e-12);

    const Environment again = gen_synthetic(small_synth(), 9);
    CHECK(again.arms == env.arms);
    CHECK(again.keyterms == env.keyterms);
    CHECK(gen_synthetic(small_synth(), 10).arms != env.arms);
    SyntheticConfig bad = small_synth();
    bad.max_arms_per_keyterm = 1000;
    CHECK_THROWS_AS(gen_synthetic(bad, 1), ConfigError);
  }

  TEST_CASE("duel feedback frequencies") {
    RandomStream rng(223);
    const Vector theta = test::random_unit(3, rng);
    const Vector x = test::random_unit(3, rng);
    long wins = 0;
    for (int i = 0; i < 10000; ++i) wins += sample_duel_feedback(kSigmoid, theta, x, x, rng) ? 1 : 0;
    CHECK(z_score(wins, 10000, 0.5) <= 3.0);

    Vector th(2), a(2), b(2);
    th << 1, 0;
    a << 1, 0;
    b << 0, 1;
    const LinkFunction clamped{LinkKind::ClampedLinear};
    for (int i = 0; i < 1000; ++i) CHECK(sample_duel_feedback(clamped, th, a, b, rng));

    for (int inst = 0; inst < 5; ++inst) {
      const Vector t2 = test::random_unit(4, rng);
      const Vector x1 = test::random_unit(4, rng);
      const Vector x2 = test::random_unit(4, rng);
      long w = 0;
      for (int i = 0; i < 10000; ++i) w += sample_duel_feedback(kSigmoid, t2, x1, x2, rng) ? 1 : 0;
      CHECK(z_score(w, 10000, duel_prob(kSigmoid, t2, x1, x2)) <= 3.0);
    }
  }

  TEST_CASE("choice feedback frequencies") {
    RandomStream rng(227);
    // theta* orthogonal to every offered item: uniform over items and outside.
    RowMatrix x(3, 3);
    x << 1, 0, 0, 0, 1, 0, -1, 0, 0;
    Vector th(3);
    th << 0, 0, 1;
    std::vector<long> counts(4, 0);
    for (int i = 0; i < 10000; ++i) {
      const Index c = sample_choice_feedback(th, x, rng);
      counts[static_cast<std::size_t>(c < 0 ? 3 : c)]++;
    }
    for (long c : counts) CHECK(z_score(c, 10000, 0.25) <= 3.0);

    const Vector t2 = test::random_unit(3, rng) * 1.5;
    const RowMatrix off = test::random_unit_rows(4, 3, rng);
    const Vector p = mnl_probs(t2, off);
    std::vector<long> c2(5, 0);
    for (int i = 0; i < 10000; ++i) {
      const Index c = sample_choice_feedback(t2, off, rng);
      c2[static_cast<std::size_t>(c < 0 ? 4 : c)]++;
    }
    for (Index i = 0; i < 5; ++i) CHECK(z_score(c2[static_cast<std::size_t>(i)], 10000, p(i)) <= 3.0);
  }

  TEST_CASE("conversation schedules") {
    const Schedule lin = Schedule::linear_floor(10);
    CHECK(lin.budget(49) == 0.0);
    CHECK(conversations_this_round(lin, 50) == 10);
    CHECK(conversations_this_round(lin, 51) == 0);
    CHECK(conversations_this_round(lin, 100) == 10);

    for (const Schedule& s : {Schedule::linear_floor(7), Schedule::log_floor(5), Schedule::proportional(0.3),
                              Schedule::none()}) {
      long total = 0;
      double prev = 0;
      for (long t = 1; t <= 1000; ++t) {
        const long c = s.conversations(t);
        CHECK(c >= 0);
        total += c;
        CHECK(s.budget(t) >= prev);
        prev = s.budget(t);
      }
      CHECK(total == static_cast<long>(std::floor(s.budget(1000))));
    }

    const Schedule lg = Schedule::log_floor(5);
    for (long t = 1; t <= 100; ++t) {
      const bool step = std::floor(std::log(static_cast<double>(t))) > std::floor(std::log(static_cast<double>(t - 1 > 0 ? t - 1 : 1)));
      CHECK((lg.conversations(t) > 0) == (t > 1 && step));
    }

    CHECK(to_string(Schedule::linear_floor(10)) == "linear:10");
    CHECK(parse_schedule("log:5").kind == ScheduleKind::LogFloor);
    CHECK(parse_schedule("proportional:0.2").param == 0.2);
    CHECK(parse_schedule(to_string(Schedule::proportional(0.25))).param == 0.25);
    CHECK_THROWS_AS(parse_schedule("weekly:3"), ConfigError);
    CHECK_THROWS_AS(parse_schedule("linear:-1"), ConfigError);
  }

  TEST_CASE("b(t) <= t for the linear and proportional families") {
    for (long t = 1; t <= 5000; ++t) {
      CHECK(Schedule::linear_floor(20).budget(t) <= static_cast<double>(t));
      CHECK(Schedule::proportional(1.0).budget(t) <= static_cast<double>(t));
    }
  }

  TEST_CASE("dueling regret") {
    RowMatrix f(3, 2);
    f << 1, 0, 0, 1, 0.6, 0.8;
    ArmPool pool{1, {0, 1, 2}, f};
    Vector th(2);
    th << 1, 0;
    CHECK(dueling_regret(pool, th, {0, 0}) == 0.0);
    CHECK(dueling_regret(pool, th, {0, 2}) == doctest::Approx(0.2));
    CHECK(dueling_regret(pool, th, {1, 2}) == doctest::Approx(1.0 - 0.3));
  }

  TEST_CASE("MNL regret") {
    RandomStream rng(229);
    for (int trial = 0; trial < 30; ++trial) {
      const RowMatrix f = test::random_unit_rows(8, 3, rng);
      ArmPool pool{1, {0, 1, 2, 3, 4, 5, 6, 7}, f};
      const Vector th = test::random_unit(3, rng);
      const Vector u = f * th;
      const auto best = optimal_assortment(u, u, 3);
      CHECK(mnl_regret(pool, th, best, 3) == doctest::Approx(0.0));
      CHECK(mnl_regret(pool, th, {}, 3) == doctest::Approx(oracle::brute_force_assortment(u, u, 3)).epsilon(1e-9));
      CHECK(mnl_regret(pool, th, {0, 1}, 3) >= -1e-12);
    }
  }

  TEST_CASE("pool sampling") {
    const Environment env = gen_synthetic(small_synth(), 2);
    RandomStream rng(3);
    const ArmPool pool = sample_pool(env, 4, 50, rng);
    CHECK(pool.size() == 50);
    CHECK(std::is_sorted(pool.ids.begin(), pool.ids.end()));
    CHECK(std::adjacent_find(pool.ids.begin(), pool.ids.end()) == pool.ids.end());
    CHECK_THROWS_AS(sample_pool(env, 1, 1, rng), ConfigError);
    CHECK_THROWS_AS(sample_pool(env, 1, 301, rng), ConfigError);
  }

  TEST_CASE("counter-based streams") {
    RandomStream a(5, 7, Purpose::Pool);
    RandomStream b(5, 7, Purpose::Pool);
    RandomStream c(5, 7, Purpose::ArmSelect);
    RandomStream d(5, 8, Purpose::Pool);
    const double va = a.uniform01();
    CHECK(va == b.uniform01());
    CHECK(va != c.uniform01());
    CHECK(va != d.uniform01());
    RandomStream e(1);
    for (int i = 0; i < 100; ++i) {
      const auto s = e.sample_without_replacement(10, 4);
      CHECK(s.size() == 4);
      auto sorted = s;
      std::sort(sorted.begin(), sorted.end());
      CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    }
  }

  TEST_CASE("experiment runner") {
    const Environment env = gen_synthetic(small_synth(), 4);
    const Spanner sp = build_spanner(env.keyterms);
    ExperimentConfig cfg;
    cfg.horizon = 1;
    cfg.pool_size = 10;
    for (PolicyKind kind : all_policy_kinds()) {
      cfg.policy.kind = kind;
      const RegretTrace tr = run_experiment(env, &sp, cfg);
      CHECK(tr.horizon() == 1);
      CHECK(tr.runs.size() == 1);
    }

    cfg.horizon = 120;
    cfg.seeds = {3, 4};
    cfg.users = {0, 2};
    cfg.policy.kind = PolicyKind::ConDuel;
    cfg.policy.duel.alpha_scale = 0.05;
    const RegretTrace a = run_experiment(env, &sp, cfg);
    cfg.threads = 3;
    const RegretTrace b = run_experiment(env, &sp, cfg);
    REQUIRE(a.runs.size() == 4);
    CHECK(a.runs[1].label == run_label(0, 4));
    CHECK(a.runs[2].label == run_label(2, 3));
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      CHECK(a.runs[i].instant == b.runs[i].instant);
      double sum = 0;
      for (std::size_t t = 0; t < a.runs[i].instant.size(); ++t) {
        CHECK(a.runs[i].instant[t] >= 0.0);
        sum += a.runs[i].instant[t];
        CHECK(a.runs[i].cumulative[t] == doctest::Approx(sum).epsilon(1e-12));
      }
    }
    CHECK(a.mean_cum == b.mean_cum);
    CHECK(a.fingerprint == b.fingerprint);
    const double mean = (a.runs[0].cumulative.back() + a.runs[1].cumulative.back() + a.runs[2].cumulative.back() +
                         a.runs[3].cumulative.back()) / 4.0;
    CHECK(a.final_mean() == doctest::Approx(mean).epsilon(1e-12));

    // Without a spanner the runner builds one; a bare run cannot.
    CHECK(run_experiment(env, nullptr, cfg).runs[3].instant == a.runs[3].instant);
    CHECK_THROWS_AS(run_single(env, nullptr, cfg, 0, 0), StructuralError);
    ExperimentConfig bad = cfg;
    bad.horizon = 0;
    CHECK_THROWS_AS(run_experiment(env, &sp, bad), ConfigError);
  }

  TEST_CASE("ConDuel beats a uniformly random pair on a small problem") {
    SyntheticConfig sc;
    sc.num_users = 1;
    sc.num_arms = 20;
    sc.num_keyterms = 8;
    sc.dim = 2;
    sc.max_arms_per_keyterm = 4;
    const Environment env = gen_synthetic(sc, 5);
    const Spanner sp = build_spanner(env.keyterms);
    ExperimentConfig cfg;
    cfg.horizon = 300;
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.pool_size = 10;
    cfg.policy.duel.alpha_scale = 0.05;
    const RegretTrace tr = run_experiment(env, &sp, cfg);
    // Expected regret of a uniform pair on the very same pools.
    double uniform = 0;
    for (std::uint64_t seed : cfg.seeds) {
      for (long t = 1; t <= cfg.horizon; ++t) {
        RandomStream rng(run_label(0, seed), static_cast<std::uint64_t>(t), Purpose::Pool);
        const ArmPool pool = sample_pool(env, t, cfg.pool_size, rng);
        const Vector u = pool.features * env.theta_star(0);
        uniform += u.maxCoeff() - u.mean();
      }
    }
    uniform /= static_cast<double>(cfg.seeds.size());
    CHECK(tr.final_mean() < uniform);
  }

  TEST_CASE("run errors carry their context") {
    RunError e("conduel", 3, 7, 42, "boom");
    CHECK(e.user() == 3);
    CHECK(e.seed() == 7);
    CHECK(e.round() == 42);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}
