// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <atomic>
#include <set>

#include "ldgea/error.hpp"
#include "ldgea/evostrat.hpp"

using namespace ldgea;

namespace {

Box cube(std::size_t n, double lo, double hi) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

EsConfig sphere_config(std::uint64_t seed, long budget) {
  EsConfig c;
  c.box = cube(5, -5.0, 5.0);
  c.budget = budget;
  c.seed = seed;
  return c;
}

const std::vector<double> kInit5{3.0, -2.0, 1.0, 4.0, -4.5};

}  // namespace

TEST_SUITE("cmsa_es") {
  TEST_CASE("resolved defaults") {
    EsConfig c;
    c.box = cube(10, 0.0, 1.0);
    CHECK(c.resolved_lambda() == 4 + static_cast<int>(std::floor(3.0 * std::log(10.0))));
    CHECK(c.resolved_mu() == std::max(1, c.resolved_lambda() / 4));
    CHECK(c.resolved_history() == 10 + static_cast<int>(std::ceil(30.0 * 10 / c.resolved_lambda())));
  }

  TEST_CASE("zero budget returns the initial point") {
    int calls = 0;
    const auto r = cmsa_es_run(
        [&](std::span<const double> x) {
          ++calls;
          return sphere(x);
        },
        sphere_config(1, 0), kInit5);
    CHECK(calls == 0);
    CHECK(r.evaluations == 0);
    CHECK(r.best == kInit5);
    CHECK(r.reason == Termination::kBudget);
  }

  TEST_CASE("non-finite objective at the initial point is an error") {
    CHECK_THROWS_AS(cmsa_es_run([](std::span<const double>) { return NAN; }, sphere_config(1, 100), kInit5),
                    ArgumentError);
    CHECK_THROWS_AS(
        cmsa_es_run(sphere, sphere_config(1, 100), std::vector<double>{9.0, 0, 0, 0, 0}),
        ArgumentError);
  }

  TEST_CASE("huge function tolerance stops after one generation") {
    auto c = sphere_config(3, 10000);
    c.tol_fun = 1e300;
    const auto r = cmsa_es_run(sphere, c, kInit5);
    CHECK(r.reason == Termination::kFunTol);
    CHECK(r.generations == 1);
    CHECK(r.evaluations == 1 + c.resolved_lambda());
  }

  TEST_CASE("parameter-change tolerance") {
    auto c = sphere_config(4, 1000000);
    c.tol_param = 1e-3;
    c.tol_fun = 1e-300;
    c.tol_hist = 1e-300;
    const auto r = cmsa_es_run(sphere, c, kInit5);
    CHECK(r.reason == Termination::kParamTol);
    CHECK(r.evaluations < c.budget);
  }

  TEST_CASE("function-value tolerance on a quantised bowl") {
    auto c = sphere_config(5, 1000000);
    c.tol_param = 1e-300;
    c.tol_hist = 1e-300;
    const auto r = cmsa_es_run([](std::span<const double> x) { return std::floor(sphere(x) * 10.0) / 10.0; },
                               c, kInit5);
    CHECK(r.reason == Termination::kFunTol);
  }

  TEST_CASE("fitness-history tolerance on a nearly flat landscape") {
    auto c = sphere_config(6, 1000000);
    c.tol_param = 1e-300;
    c.tol_fun = 1e-300;
    const auto r = cmsa_es_run(
        [](std::span<const double> x) {
          const double s = std::sin(1000.0 * (x[0] + 2.0 * x[1] + 3.0 * x[2]));
          return 1.0 + 1e-9 * s * s;
        },
        c, kInit5);
    CHECK(r.reason == Termination::kHistTol);
    CHECK(r.generations >= c.resolved_history());
  }

  TEST_CASE("budget stop uses whole generations only") {
    const auto c = sphere_config(7, 100);
    const auto r = cmsa_es_run(sphere, c, kInit5);
    CHECK(r.reason == Termination::kBudget);
    CHECK(r.evaluations <= 100);
    CHECK((r.evaluations - 1) % c.resolved_lambda() == 0);
    CHECK(r.evaluations + c.resolved_lambda() > 100);
  }

  TEST_CASE("external stop") {
    std::atomic<bool> stop{true};
    auto c = sphere_config(8, 10000);
    c.stop = &stop;
    const auto r = cmsa_es_run(sphere, c, kInit5);
    CHECK(r.reason == Termination::kExternalStop);
    CHECK(r.generations == 0);
  }

  TEST_CASE("5-D sphere reaches 1e-6 within 5000 evaluations") {
    int ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto c = sphere_config(seed, 5000);
      c.tol_param = 1e-300;
      c.tol_fun = 1e-300;
      c.tol_hist = 1e-300;
      ok += cmsa_es_run(sphere, c, kInit5).best_value < 1e-6 ? 1 : 0;
    }
    CHECK(ok >= 9);
  }

  TEST_CASE("accounting, box respect, monotone incumbent and determinism") {
    long calls = 0;
    bool inside = true;
    const auto c = [] {
      EsConfig e;
      e.box = Box{{-1.0, 0.0, 2.0}, {1.0, 0.5, 9.0}};
      e.budget = 3000;
      e.seed = 99;
      return e;
    }();
    const Objective f = [&](std::span<const double> x) {
      ++calls;
      inside = inside && c.box.contains(x);
      return (x[0] - 0.9) * (x[0] - 0.9) + std::abs(x[1] - 0.49) + (x[2] - 2.0) * (x[2] - 2.0);
    };
    const std::vector<double> init{0.0, 0.25, 5.0};
    const auto r = cmsa_es_run(f, c, init);
    CHECK(calls == r.evaluations);
    CHECK(r.evaluations <= c.budget);
    CHECK(inside);
    CHECK(c.box.contains(r.best));
    double running = INFINITY;
    for (double v : r.trace) {
      const double next = std::min(running, v);
      CHECK(next <= running);
      running = next;
    }
    CHECK(r.best_value <= running);
    const auto again = cmsa_es_run(f, c, init);
    CHECK(again.trace == r.trace);
    CHECK(again.best == r.best);
  }

  TEST_CASE("supplied initial value saves one evaluation") {
    const auto c = sphere_config(9, 100);
    const auto a = cmsa_es_run(sphere, c, kInit5);
    const auto b = cmsa_es_run(sphere, c, kInit5, sphere(kInit5));
    CHECK(b.trace == a.trace);
    CHECK(b.evaluations == a.evaluations - 1);
  }

  TEST_CASE("invalid configurations") {
    auto c = sphere_config(1, 100);
    c.mu = 50;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = sphere_config(1, 100);
    c.tol_fun = 0.0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c.box = Box{};
    CHECK_THROWS_AS(c.validate(), ArgumentError);
  }
}

TEST_SUITE("integer handling") {
  TEST_CASE("nearest index with catalog clamp") {
    CHECK(round_integer_coordinate(2.4, 20) == 2);
    CHECK(round_integer_coordinate(2.6, 20) == 3);
    CHECK(round_integer_coordinate(-0.7, 20) == 0);
    CHECK(round_integer_coordinate(19.4, 20) == 19);
    CHECK(round_integer_coordinate(25.0, 20) == 19);
    CHECK_THROWS_AS(round_integer_coordinate(1.0, 0), ArgumentError);
  }

  TEST_CASE("minimum integer standard deviation") {
    // 0.5 / Phi^-1(1 - p / 2), evaluated independently for p = 1/24.
    CHECK(integer_min_std(1.0 / 24.0) == doctest::Approx(0.2454789971).epsilon(1e-8));
    CHECK(integer_min_std(0.5) > integer_min_std(0.1));
  }

  TEST_CASE("evaluation point rounds masked coordinates only") {
    MixedSpace s;
    s.box = Box{{0.0, 0.0}, {1.0, 19.0}};
    s.integer_mask = {false, true};
    s.catalog_size = 20;
    const auto p = s.evaluation_point(std::vector<double>{0.37, 2.4});
    CHECK(p[0] == 0.37);
    CHECK(p[1] == 2.0);
  }

  TEST_CASE("no integer coordinate freezes on a flat objective") {
    MixedSpace s;
    s.box = Box{{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 19.0, 19.0, 19.0}};
    s.integer_mask = {false, false, false, true, true, true};
    s.catalog_size = 20;
    CmaEs es(s, CmaParams{}, std::vector<double>{0.5, 0.5, 0.5, 7.0, 7.0, 7.0}, 4);
    std::vector<std::set<double>> seen(6);
    std::vector<int> changes(6, 0);
    std::vector<double> last;
    for (int g = 0; g < 1000; ++g) {
      const auto& pop = es.ask();
      for (const auto& x : pop) {
        const auto p = s.evaluation_point(x);
        if (!last.empty()) {
          for (int i = 3; i < 6; ++i) changes[i] += p[i] != last[i] ? 1 : 0;
        }
        last = p;
      }
      es.tell(std::vector<double>(pop.size(), 0.0));
      const auto sd = es.coordinate_std();
      for (int i = 3; i < 6; ++i) CHECK(sd[i] >= integer_min_std(1.0 / 6.0) * (1.0 - 1e-9));
    }
    for (int i = 3; i < 6; ++i) CHECK(changes[i] > 0);
  }
}

TEST_SUITE("baseline") {
  MixedSpace mixed() {
    MixedSpace s;
    s.box = Box{{-2.0, -2.0, -2.0, 0.0, 0.0}, {2.0, 2.0, 2.0, 9.0, 9.0}};
    s.integer_mask = {false, false, false, true, true};
    s.catalog_size = 10;
    return s;
  }

  // Several basins so that restarts converge to different points.
  double rastrigin_like(std::span<const double> x) {
    double f = 0.0;
    for (int i = 0; i < 3; ++i) f += x[i] * x[i] + 1.0 - std::cos(6.0 * x[i]);
    f += 0.1 * std::abs(x[3] - 4.0) + 0.1 * std::abs(x[4] - 6.0);
    return f;
  }

  TEST_CASE("restarts consume exactly the configured budget") {
    for (long budget : {5000L, 20000L, 33333L}) {
      long calls = 0;
      BaselineConfig cfg;
      cfg.budget = budget;
      cfg.seed = 21;
      int callbacks = 0;
      cfg.on_converged = [&](const ConvergedPoint&) { ++callbacks; };
      const auto r = cma_es_baseline_run(
          [&](std::span<const double> x) {
            ++calls;
            return rastrigin_like(x);
          },
          mixed(), cfg);
      CHECK(r.evaluations == budget);
      CHECK(calls == budget);
      CHECK_FALSE(r.interrupted);
      CHECK(r.restarts >= 1);
      CHECK(static_cast<int>(r.archive.size()) == callbacks);
      long used = 0;
      for (const auto& p : r.archive) used += p.evaluations;
      CHECK(used == budget);
      CHECK(r.archive.back().reason == Termination::kBudget);
      for (const auto& p : r.archive) {
        CHECK(p.x[3] == std::round(p.x[3]));
        CHECK(p.x[4] == std::round(p.x[4]));
      }
    }
  }

  TEST_CASE("regimes alternate between large and small populations") {
    BaselineConfig cfg;
    cfg.budget = 60000;
    cfg.seed = 5;
    const auto r = cma_es_baseline_run(rastrigin_like, mixed(), cfg);
    REQUIRE(r.archive.size() >= 3);
    const int def = r.archive.front().lambda;
    CHECK(def == 4 + static_cast<int>(std::floor(3.0 * std::log(5.0))));
    bool larger = false;
    for (const auto& p : r.archive) larger = larger || p.lambda > def;
    CHECK(larger);
  }

  TEST_CASE("interruption keeps what was found") {
    std::atomic<bool> stop{false};
    long calls = 0;
    BaselineConfig cfg;
    cfg.budget = 50000;
    cfg.seed = 2;
    cfg.stop = &stop;
    const auto r = cma_es_baseline_run(
        [&](std::span<const double> x) {
          if (++calls == 3000) stop = true;
          return rastrigin_like(x);
        },
        mixed(), cfg);
    CHECK(r.interrupted);
    CHECK(r.evaluations == calls);
    CHECK(r.evaluations < cfg.budget);
    REQUIRE_FALSE(r.archive.empty());
    CHECK(std::isfinite(r.archive.back().value));
  }

  TEST_CASE("same seed, same archive") {
    BaselineConfig cfg;
    cfg.budget = 8000;
    cfg.seed = 77;
    const auto a = cma_es_baseline_run(rastrigin_like, mixed(), cfg);
    const auto b = cma_es_baseline_run(rastrigin_like, mixed(), cfg);
    REQUIRE(a.archive.size() == b.archive.size());
    for (std::size_t i = 0; i < a.archive.size(); ++i) {
      CHECK(a.archive[i].x == b.archive[i].x);
      CHECK(a.archive[i].value == b.archive[i].value);
    }
  }
}
