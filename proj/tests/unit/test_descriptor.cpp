// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <map>
#include <sstream>

#include "ldgea/descriptor.hpp"
#include "test_support.hpp"

using namespace ldgea;
using namespace ldgea::testing;

namespace {

// Singlet with a flat back surface in glass G3 of a four-glass catalog.
LensTemplate flat_back_singlet(const GlassCatalog& cat) {
  std::istringstream in(
      "target_efl = 100\nepd = 10\nhalf_field_deg = 5\n[surfaces]\n"
      "50 3 G3 10 1 5\n"
      "inf 1 AIR 10 0.2 5\n"
      "stop solve AIR 10\n");
  return parse_preset(in, cat);
}

Descriptor desc(const std::string& s) { return Descriptor::parse(s); }

DescriptorSpace small_space(bool positive_first) { return {2, 1, 2, positive_first}; }

}  // namespace

TEST_SUITE("describe") {
  const auto cat4 = constant_catalog({1.5, 1.6, 1.7, 1.8});

  TEST_CASE("positive, flat, glass 3 maps to (1, 0, 3)") {
    const auto t = flat_back_singlet(cat4);
    const auto d = describe(t, t.reference_point());
    CHECK(d.signs == std::vector<int>{1, 0});
    CHECK(d.materials == std::vector<int>{3});
    CHECK(d.to_string() == "+0|3");
    CHECK(describe(t, t.base) == d);
  }

  TEST_CASE("curvature magnitude and thickness do not change the descriptor") {
    const auto p = problem("double_gauss");
    const auto& t = p.lens();
    const auto ref = t.reference_point();
    const auto d0 = describe(t, ref);
    auto scaled = ref;
    for (std::size_t i = 0; i < t.n_curvatures(); ++i) scaled.continuous[i] *= 2.0;
    CHECK(describe(t, scaled) == d0);
    auto thick = ref;
    for (std::size_t i = t.n_curvatures(); i < t.n_continuous(); ++i) thick.continuous[i] += 1.7;
    CHECK(describe(t, thick) == d0);
  }

  TEST_CASE("string form round-trips and rejects garbage") {
    for (const char* s : {"+-0|1,2,3", "+|0", "-+-+|19,0"}) CHECK(desc(s).to_string() == s);
    for (const char* s : {"", "+-", "+x|1", "+|a", "+|1,,2", "+|-1"}) {
      CHECK_THROWS_AS(desc(s), ArgumentError);
    }
  }
}

TEST_SUITE("equivalent") {
  TEST_CASE("reflexive, value tolerance, material difference") {
    const auto p = problem("triplet");
    const auto& t = p.lens();
    const auto a = t.reference_point();
    const double f = p.value(a);
    const double tol = equivalence_tolerance(f);
    CHECK(tol == doctest::Approx(1e-9 * std::max(1.0, std::abs(f))));
    CHECK(equivalent(t, a, a, f, f, tol));
    CHECK_FALSE(equivalent(t, a, a, f, f + 10.0 * tol, tol));
    auto b = a;
    b.materials[1] = (b.materials[1] + 1) % 20;
    CHECK_FALSE(equivalent(t, a, b, f, f, tol));
  }
}

TEST_SUITE("sample") {
  TEST_CASE("degenerate distribution always returns its descriptor") {
    const DescriptorSpace sp{3, 2, 4, true};
    auto dist = DescriptorDistribution::uniform(sp, 0.0);
    dist.p_plus = {1.0, 1.0, 1.0};
    dist.categorical = {{0, 0, 1, 0}, {0, 0, 0, 1}};
    Rng rng(1);
    for (int i = 0; i < 200; ++i) CHECK(sample(dist, sp, rng).to_string() == "+++|2,3");
    // A batch cannot avoid duplicates and accepts them after the retries.
    const auto batch = sample_batch(dist, sp, 5, rng);
    CHECK(batch.size() == 5);
    for (const auto& d : batch) CHECK(d.to_string() == "+++|2,3");
  }

  TEST_CASE("uniform over 2 signs x 2 glasses hits each descriptor with frequency 1/8") {
    const auto sp = small_space(false);
    const auto dist = DescriptorDistribution::uniform(sp, 0.0);
    Rng rng(99);
    std::map<std::string, int> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[sample(dist, sp, rng).to_string()]++;
    REQUIRE(counts.size() == 8);
    const double sigma = std::sqrt(n * 0.125 * 0.875);
    for (const auto& [k, c] : counts) {
      CHECK(std::abs(c - n * 0.125) <= 3.0 * sigma);
      CHECK(probability(dist, sp, desc(k)) == doctest::Approx(0.125));
    }
  }

  TEST_CASE("positive-first flag forces the first sign") {
    const DescriptorSpace sp{6, 3, 20, true};
    const auto dist = DescriptorDistribution::uniform(sp, 1e-3);
    Rng rng(3);
    for (const auto& d : sample_batch(dist, sp, 500, rng)) CHECK(d.signs[0] == 1);
    CHECK(probability(dist, sp, desc("-+++++|0,0,0")) == 0.0);
  }

  TEST_CASE("batch draws are reproducible and avoid duplicates when possible") {
    const DescriptorSpace sp{6, 3, 20, true};
    const auto dist = DescriptorDistribution::uniform(sp, 1e-3);
    Rng a(17), b(17);
    const auto x = sample_batch(dist, sp, 50, a);
    CHECK(x == sample_batch(dist, sp, 50, b));
    std::map<Descriptor, int> seen;
    for (const auto& d : x) seen[d]++;
    CHECK(seen.size() == 50);
  }
}

TEST_SUITE("update") {
  const DescriptorSpace sp{3, 2, 4, false};

  TEST_CASE("alpha 0 leaves the model unchanged") {
    auto p = DescriptorDistribution::uniform(sp, 0.01);
    p.p_plus = {0.2, 0.7, 0.5};
    const std::vector<Descriptor> sel{desc("+++|0,1")};
    const auto q = update(p, sel, 0.0);
    CHECK(q.p_plus == p.p_plus);
    CHECK(q.categorical == p.categorical);
  }

  TEST_CASE("alpha 1, mu 1 puts all mass on the selected components") {
    const auto p = DescriptorDistribution::uniform(sp, 0.0);
    const std::vector<Descriptor> sel{desc("+-+|2,0")};
    const auto q = update(p, sel, 1.0);
    CHECK(q.p_plus == std::vector<double>{1.0, 0.0, 1.0});
    CHECK(q.categorical[0] == std::vector<double>{0, 0, 1, 0});
    CHECK(q.categorical[1] == std::vector<double>{1, 0, 0, 0});
  }

  TEST_CASE("alpha 1, mu 2 with opposite signs gives one half") {
    const auto p = DescriptorDistribution::uniform(sp, 0.0);
    const std::vector<Descriptor> sel{desc("++-|1,1"), desc("+--|3,1")};
    const auto q = update(p, sel, 1.0);
    CHECK(q.p_plus[0] == 1.0);
    CHECK(q.p_plus[1] == 0.5);
    CHECK(q.p_plus[2] == 0.0);
    CHECK(q.categorical[0] == std::vector<double>{0, 0.5, 0, 0.5});
    CHECK(q.categorical[1] == std::vector<double>{0, 1, 0, 0});
  }

  TEST_CASE("partial learning rate mixes linearly") {
    const auto p = DescriptorDistribution::uniform(sp, 0.0);
    const std::vector<Descriptor> sel{desc("+++|0,0")};
    const auto q = update(p, sel, 0.25);
    CHECK(q.p_plus[0] == doctest::Approx(0.75 * 0.5 + 0.25));
    CHECK(q.categorical[0][0] == doctest::Approx(0.75 * 0.25 + 0.25));
    CHECK(q.categorical[0][1] == doctest::Approx(0.75 * 0.25));
  }

  TEST_CASE("argument errors") {
    const auto p = DescriptorDistribution::uniform(sp, 0.0);
    CHECK_THROWS_AS(update(p, std::vector<Descriptor>{}, 1.0), ArgumentError);
    const std::vector<Descriptor> sel{desc("+++|0,0")};
    CHECK_THROWS_AS(update(p, sel, 1.5), ArgumentError);
    CHECK_THROWS_AS(update(p, sel, -0.1), ArgumentError);
  }

  TEST_CASE("floored model stays normalised and the repeated winner dominates") {
    const DescriptorSpace tri{6, 3, 20, true};
    for (double eps : {1e-3, 3e-3, 1e-2}) {
      auto p = DescriptorDistribution::uniform(tri, eps);
      const Descriptor x = desc("+--++-|9,15,9");
      const std::vector<Descriptor> sel(5, x);
      for (int t = 0; t < 3; ++t) p = update(p, sel, 1.0);
      for (double b : p.p_plus) {
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
      }
      for (const auto& c : p.categorical) {
        double s = 0.0;
        for (double v : c) {
          CHECK(v >= 0.0);
          s += v;
        }
        CHECK(std::abs(s - 1.0) < 1e-12);
      }
      // Each factor keeps at least 1 / (1 + eps (K - 1)) on the winner.
      double bound = 1.0;
      for (std::size_t j = 1; j < tri.n_signs; ++j) bound /= 1.0 + eps;
      for (std::size_t j = 0; j < tri.n_materials; ++j) bound /= 1.0 + eps * 19.0;
      const double px = probability(p, tri, x);
      CHECK(px >= bound * (1.0 - 1e-12));
      CHECK(px > probability(p, tri, desc("+--++-|9,15,8")));
      CHECK(px > probability(p, tri, desc("+-+++-|9,15,9")));
    }
  }

  TEST_CASE("KL between successive models vanishes once selection is stationary") {
    const DescriptorSpace tri{6, 3, 20, true};
    auto p = DescriptorDistribution::uniform(tri, 3e-3);
    const std::vector<Descriptor> sel{desc("+--++-|9,15,9"), desc("+-+++-|1,15,9")};
    auto q = update(p, sel, 1.0);
    CHECK(kl_divergence(q, p) > 0.1);
    for (int t = 0; t < 3; ++t) {
      p = q;
      q = update(p, sel, 1.0);
    }
    CHECK(kl_divergence(q, p) < 1e-24);
  }
}

TEST_SUITE("kl_divergence") {
  TEST_CASE("identical models") {
    const DescriptorSpace sp{4, 2, 5, false};
    const auto p = DescriptorDistribution::uniform(sp, 0.0);
    CHECK(kl_divergence(p, p) == 0.0);
  }

  TEST_CASE("Bernoulli 0.5 against 0.25") {
    const DescriptorSpace sp{1, 0, 0, false};
    auto p = DescriptorDistribution::uniform(sp, 0.0);
    auto q = p;
    q.p_plus = {0.25};
    CHECK(std::abs(kl_divergence(p, q) - 0.1438410362) < 1e-9);
  }

  TEST_CASE("non-negative on random pairs") {
    const DescriptorSpace sp{4, 2, 6, false};
    Rng rng(8);
    auto random_model = [&] {
      auto d = DescriptorDistribution::uniform(sp, 0.0);
      for (auto& b : d.p_plus) b = 0.01 + 0.98 * uniform01(rng);
      for (auto& c : d.categorical) {
        double s = 0.0;
        for (auto& v : c) s += (v = 0.01 + uniform01(rng));
        for (auto& v : c) v /= s;
      }
      return d;
    };
    for (int i = 0; i < 1000; ++i) CHECK(kl_divergence(random_model(), random_model()) >= 0.0);
  }
}

TEST_SUITE("subspace_bounds") {
  TEST_CASE("sign boxes and template thickness bounds") {
    const auto p = problem("triplet");
    const auto& t = p.lens();
    const auto box = subspace_bounds(desc("+-+-+-|0,1,2"), t, p.space());
    REQUIRE(box.size() == t.n_continuous());
    const double m = p.space().sign_margin;
    CHECK(box.lower[0] == m);
    CHECK(box.upper[0] == 0.25);
    CHECK(box.lower[1] == -0.25);
    CHECK(box.upper[1] == -m);
    for (std::size_t i = 0; i < t.n_thicknesses(); ++i) {
      CHECK(box.lower[t.n_curvatures() + i] == t.thickness_bounds[i].lower);
      CHECK(box.upper[t.n_curvatures() + i] == t.thickness_bounds[i].upper);
    }
  }

  TEST_CASE("flat sign and wrong first sign are rejected") {
    const auto p = problem("triplet");
    CHECK_THROWS_AS(subspace_bounds(desc("+0+-+-|0,1,2"), p.lens(), p.space()), ArgumentError);
    CHECK_THROWS_AS(subspace_bounds(desc("--+-+-|0,1,2"), p.lens(), p.space()), ArgumentError);
    CHECK_THROWS_AS(subspace_bounds(desc("++|0"), p.lens(), p.space()), ArgumentError);
  }

  TEST_CASE("every point in the box describes to the descriptor") {
    const auto p = problem("double_gauss");
    const DescriptorSpace sp = p.descriptor_space();
    const auto dist = DescriptorDistribution::uniform(sp, 0.0);
    Rng rng(12);
    for (int k = 0; k < 50; ++k) {
      const auto x = sample(dist, sp, rng);
      const auto box = subspace_bounds(x, p.lens(), p.space());
      for (int j = 0; j < 20; ++j) {
        const auto c = box.sample_uniform(rng);
        CHECK(describe(p.lens(), with_materials(c, x)) == x);
      }
      // Corners too.
      CHECK(describe(p.lens(), with_materials(box.lower, x)) == x);
      CHECK(describe(p.lens(), with_materials(box.upper, x)) == x);
    }
  }
}
