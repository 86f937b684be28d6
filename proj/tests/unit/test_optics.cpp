// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "test_support.hpp"

using namespace ldgea;
using namespace ldgea::testing;

namespace {

double angle_to_normal(const Vec3<double>& d, const Vec3<double>& n) {
  const double c = std::abs(dot(d, n)) / std::sqrt(dot(d, d) * dot(n, n));
  return std::acos(std::min(1.0, c));
}

Vec3<double> unit(Vec3<double> v) {
  const double n = std::sqrt(dot(v, v));
  return {v.x / n, v.y / n, v.z / n};
}

}  // namespace

TEST_SUITE("glass") {
  TEST_CASE("air has index one") {
    const auto cat = catalog20();
    CHECK(cat->index(kAir, kLineD) == 1.0);
    CHECK(refractive_index(nullptr, kLineD) == 1.0);
  }

  TEST_CASE("constant model returns n_d at the d line") {
    const Glass g = Glass::constant("K", 1.5168, 1.52, 1.51);
    CHECK(g.index(kLineD) == doctest::Approx(1.5168).epsilon(1e-15));
  }

  TEST_CASE("Sellmeier N-BK7 against hand evaluation") {
    // Independent evaluation of the three-term formula.
    const auto cat = catalog20();
    const int id = *cat->find("N-BK7");
    CHECK(std::abs(cat->index(id, kLineD) - 1.5168001097) < 1e-9);
    CHECK(std::abs(cat->index(id, kLineF) - 1.5223764851) < 1e-9);
    CHECK(std::abs(cat->index(id, kLineC) - 1.5143224252) < 1e-9);
    CHECK(std::abs(cat->index(id, kLineD) - 1.5168) < 1e-4);
  }

  TEST_CASE("wavelength outside validity names the glass") {
    const auto cat = catalog20();
    try {
      (void)cat->index(0, 5.0);
      FAIL("expected DomainError");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("N-BK7") != std::string::npos);
    }
  }

  TEST_CASE("catalog is dense, indices above one") {
    const auto cat = catalog20();
    REQUIRE(cat->size() == 20);
    for (int i = 0; i < 20; ++i) {
      CHECK(cat->at(i).id == i);
      for (double wl : {kLineF, kLineD, kLineC}) {
        const double n = cat->index(i, wl);
        CHECK(std::isfinite(n));
        CHECK(n > 1.0);
      }
    }
  }

  TEST_CASE("catalog parse rejects malformed lines") {
    std::istringstream in("X,sellmeier,1,2\n");
    CHECK_THROWS_AS(GlassCatalog::parse(in), ConfigError);
  }
}

TEST_SUITE("refract") {
  TEST_CASE("index-matched interface leaves direction unchanged") {
    Ray r;
    r.direction = unit({0.2, -0.3, 0.9});
    const auto out = refract(r, Vec3<double>{0.1, 0.0, 1.0}, 1.5, 1.5);
    CHECK(out.direction.x == r.direction.x);
    CHECK(out.direction.y == r.direction.y);
    CHECK(out.direction.z == r.direction.z);
  }

  TEST_CASE("normal incidence leaves direction unchanged") {
    Ray r;
    r.direction = {0.0, 0.0, 1.0};
    const auto out = refract(r, Vec3<double>{0.0, 0.0, 1.0}, 1.0, 1.5);
    CHECK(out.alive());
    CHECK(out.direction.x == 0.0);
    CHECK(out.direction.y == 0.0);
    CHECK(out.direction.z == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("60 degrees from glass to air exceeds the 41.81 degree critical angle") {
    const double crit = std::asin(1.0 / 1.5) * 180.0 / std::numbers::pi;
    CHECK(crit == doctest::Approx(41.810315).epsilon(1e-7));
    const double a = 60.0 * std::numbers::pi / 180.0;
    Ray r;
    r.direction = {0.0, std::sin(a), std::cos(a)};
    const auto out = refract(r, Vec3<double>{0.0, 0.0, 1.0}, 1.5, 1.0);
    CHECK(out.status == RayStatus::kTotalInternalReflection);
    // Just below the critical angle the ray survives.
    const double b = (crit - 0.01) * std::numbers::pi / 180.0;
    r.direction = {0.0, std::sin(b), std::cos(b)};
    CHECK(refract(r, Vec3<double>{0.0, 0.0, 1.0}, 1.5, 1.0).alive());
  }

  TEST_CASE("dead ray is passed through untouched") {
    Ray r;
    r.status = RayStatus::kVignetted;
    r.direction = unit({0.0, 0.9, 0.1});
    CHECK(refract(r, Vec3<double>{0.0, 0.0, 1.0}, 1.5, 1.0).status == RayStatus::kVignetted);
  }

  TEST_CASE("Snell invariant and unit norm on random refractions") {
    Rng rng(7);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double n1 = 1.0 + uniform01(rng), n2 = 1.0 + uniform01(rng);
      const Vec3<double> n = unit({standard_normal(rng) * 0.3, standard_normal(rng) * 0.3, 1.0});
      Ray r;
      r.direction = unit({standard_normal(rng) * 0.4, standard_normal(rng) * 0.4, 1.0});
      const auto out = refract(r, n, n1, n2);
      if (!out.alive()) continue;
      const double lhs = n1 * std::sin(angle_to_normal(r.direction, n));
      const double rhs = n2 * std::sin(angle_to_normal(out.direction, n));
      worst = std::max(worst, std::abs(lhs - rhs));
      CHECK(std::abs(dot(out.direction, out.direction) - 1.0) < 1e-12);
    }
    CHECK(worst < 1e-12);
  }
}

TEST_SUITE("paraxial") {
  const auto cat15 = constant_catalog({1.5});

  TEST_CASE("thin biconvex singlet matches the lensmaker equation") {
    const auto d = singlet(0.01, -0.01, 0.0);
    CHECK(effective_focal_length(d, cat15, kLineD) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(paraxial_image_distance(d, cat15, kLineD) == doctest::Approx(100.0).epsilon(1e-12));
  }

  TEST_CASE("thick singlet matches the thick-lens formula") {
    // 1/f = (n-1)(c1-c2) + (n-1)^2 t c1 c2 / n, evaluated by hand.
    const auto d = singlet(0.01, -0.01, 2.0);
    CHECK(effective_focal_length(d, cat15, kLineD) == doctest::Approx(100.334448160535).epsilon(1e-12));
    CHECK(paraxial_image_distance(d, cat15, kLineD) == doctest::Approx(99.665551839465).epsilon(1e-12));
  }

  TEST_CASE("plane-parallel plate has no power") {
    const auto d = singlet(0.0, 0.0, 5.0);
    CHECK_THROWS_AS((void)effective_focal_length(d, cat15, kLineD), NoPowerError);
    CHECK_THROWS_AS((void)paraxial_image_distance(d, cat15, kLineD), NoPowerError);
  }

  TEST_CASE("entrance pupil of a front stop is at the first vertex") {
    const auto d = singlet(0.01, -0.01, 2.0);
    CHECK(entrance_pupil_position(d, cat15, kLineD) == 0.0);
  }

  TEST_CASE("scale covariance of EFL and image distance") {
    const auto cat = catalog20();
    const auto t = preset("double_gauss");
    for (double s : {0.5, 2.0, 3.7}) {
      const auto a = t.base;
      const auto b = scale_design(a, s);
      const double fa = effective_focal_length(a, *cat, kLineD);
      const double fb = effective_focal_length(b, *cat, kLineD);
      CHECK(std::abs(fb / (s * fa) - 1.0) < 1e-9);
      const double ia = paraxial_image_distance(a, *cat, kLineD);
      const double ib = paraxial_image_distance(b, *cat, kLineD);
      CHECK(std::abs(ib / (s * ia) - 1.0) < 1e-9);
    }
  }

  TEST_CASE("hexapolar grid sizes") {
    CHECK(hexapolar_pupil(1).size() == 1);
    CHECK(hexapolar_pupil(3).size() == 19);
    CHECK_THROWS_AS(hexapolar_pupil(0), ArgumentError);
  }
}

TEST_SUITE("trace") {
  const auto cat15 = constant_catalog({1.5});

  TEST_CASE("axial ray lands on the axis exactly") {
    const auto cat = catalog20();
    const auto t = preset("double_gauss");
    Ray r;
    r.origin = {0.0, 0.0, -10.0};
    r.direction = {0.0, 0.0, 1.0};
    const auto out = trace(t.base, *cat, r);
    REQUIRE(out.alive());
    CHECK((*out.landing)[0] == 0.0);
    CHECK((*out.landing)[1] == 0.0);
  }

  TEST_CASE("ray outside the first clear aperture is vignetted at surface 0") {
    auto d = singlet(0.01, -0.01, 2.0, 5.0);
    d.surfaces[0].is_stop = false;
    d.surfaces.insert(d.surfaces.begin() + 1, Surface{0.0, 5.0, 0.0, 0, true});
    std::swap(d.surfaces[0].thickness, d.surfaces[1].thickness);
    Ray r;
    r.origin = {0.0, 6.0, -5.0};
    r.direction = {0.0, 0.0, 1.0};
    const auto out = trace(d, cat15, r);
    CHECK(out.status == RayStatus::kVignetted);
    CHECK(out.failed_surface == 0);
    CHECK_FALSE(out.alive());
  }

  TEST_CASE("marginal ray of the thin singlet lands near the paraxial focus") {
    const auto d = singlet(0.01, -0.01, 0.0, 10.0, 10.0, 100.0);
    Ray r;
    r.origin = {0.0, 5.0, -1.0};
    r.direction = {0.0, 0.0, 1.0};
    const auto out = trace(d, cat15, r);
    REQUIRE(out.alive());
    CHECK(std::hypot((*out.landing)[0], (*out.landing)[1]) < 0.5);
    CHECK(std::abs((*out.landing)[1]) > 0.0);  // spherical aberration is present
  }

  TEST_CASE("one signed path per traversed gap") {
    const auto d = singlet(0.01, -0.01, 2.0, 10.0, 10.0, 100.0);
    Ray r;
    r.origin = {0.0, 2.0, -1.0};
    r.direction = {0.0, 0.0, 1.0};
    const auto out = trace(d, cat15, r);
    REQUIRE(out.alive());
    CHECK(out.segment_lengths.size() == d.surfaces.size());
    for (double s : out.segment_lengths) CHECK(s > 0.0);
  }

  TEST_CASE("rotating the ray fan rotates the landing points") {
    const auto cat = catalog20();
    const auto t = preset("double_gauss");
    const double pupil = entrance_pupil_position(t.base, *cat, kLineD);
    const double start = launch_plane(t.base, pupil);
    const double a = 7.0 * std::numbers::pi / 180.0;
    for (int k = 0; k < 4; ++k) {
      const double phi = k * std::numbers::pi / 2.0 + 0.3;
      const double cphi = std::cos(phi), sphi = std::sin(phi);
      // Reference ray in the y-z plane, rotated copy about z.
      const auto ref = launch_ray(pupil, t.base.entrance_pupil_diameter, 7.0, 0.3, 0.4, kLineD, start);
      Ray rot = ref;
      rot.origin = {cphi * ref.origin.x - sphi * ref.origin.y, sphi * ref.origin.x + cphi * ref.origin.y,
                    ref.origin.z};
      rot.direction = {-sphi * std::sin(a), cphi * std::sin(a), std::cos(a)};
      const auto o1 = trace(t.base, *cat, ref);
      const auto o2 = trace(t.base, *cat, rot);
      REQUIRE(o1.alive());
      REQUIRE(o2.alive());
      const double ex = cphi * (*o1.landing)[0] - sphi * (*o1.landing)[1];
      const double ey = sphi * (*o1.landing)[0] + cphi * (*o1.landing)[1];
      CHECK(std::abs((*o2.landing)[0] - ex) < 1e-9);
      CHECK(std::abs((*o2.landing)[1] - ey) < 1e-9);
    }
  }

  TEST_CASE("landing points scale with the design") {
    const auto cat = catalog20();
    const auto t = preset("double_gauss");
    const double s = 2.5;
    const auto b = scale_design(t.base, s);
    const double pa = entrance_pupil_position(t.base, *cat, kLineD);
    const double pb = entrance_pupil_position(b, *cat, kLineD);
    for (double f : {0.0, 5.0, 10.0}) {
      const auto ra = launch_ray(pa, t.base.entrance_pupil_diameter, f, 0.2, -0.6, kLineF,
                                 launch_plane(t.base, pa));
      const auto rb = launch_ray(pb, b.entrance_pupil_diameter, f, 0.2, -0.6, kLineF, launch_plane(b, pb));
      const auto oa = trace(t.base, *cat, ra);
      const auto ob = trace(b, *cat, rb);
      REQUIRE(oa.alive());
      REQUIRE(ob.alive());
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs((*ob.landing)[i] - s * (*oa.landing)[i]) <=
              1e-9 * std::max(1.0, std::abs(s * (*oa.landing)[i])));
      }
    }
  }

  TEST_CASE("steep exit surface reflects internally") {
    // sin(i) = 4.5 / 5 = 0.9 exceeds 1 / 1.5.
    auto d = singlet(0.0, 0.2, 1.0, 4.9, 9.0, 50.0);
    Ray r;
    r.origin = {0.0, 4.5, -1.0};
    r.direction = {0.0, 0.0, 1.0};
    const auto out = trace(d, cat15, r);
    CHECK(out.status == RayStatus::kTotalInternalReflection);
    CHECK(out.failed_surface == 1);
  }
}

TEST_SUITE("gradient") {
  TEST_CASE("sum of squares gives 2x") {
    const std::vector<double> x{0.5, -1.5, 3.0};
    const auto g = gradient(
        [](std::span<const Dual> v) {
          Dual s(0.0);
          for (const auto& e : v) s = s + e * e;
          return s;
        },
        x);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(g[i] == 2.0 * x[i]);
  }

  TEST_CASE("EFL derivative of the thin singlet is -f^2 (n - 1)") {
    const auto cat15 = constant_catalog({1.5});
    const std::vector<double> c{0.01, -0.01};
    const auto g = gradient(
        [&](std::span<const Dual> v) {
          auto d = convert_design<Dual>(singlet(0.01, -0.01, 0.0));
          d.surfaces[0].curvature = v[0];
          d.surfaces[1].curvature = v[1];
          return effective_focal_length(d, cat15, kLineD);
        },
        c);
    CHECK(g[0] == doctest::Approx(-5000.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(5000.0).epsilon(1e-12));
  }

  TEST_CASE("too many parameters") {
    std::vector<double> x(Dual::kMaxTangents + 1, 1.0);
    CHECK_THROWS_AS(gradient([](std::span<const Dual> v) { return v[0]; }, x), ArgumentError);
  }

  TEST_CASE("non-finite scalar propagates an evaluation error") {
    const std::vector<double> x{1.0};
    CHECK_THROWS_AS(gradient([](std::span<const Dual> v) { return v[0] / Dual(0.0); }, x),
                    EvaluationError);
  }

  TEST_CASE("merit gradient matches central differences on perturbed Double-Gauss designs") {
    const auto p = problem("double_gauss");
    Rng rng(2026);
    for (int k = 0; k < 5; ++k) {
      const auto pt = random_feasible(p, rng);
      std::vector<double> g;
      p.value_and_gradient(pt, g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double h = 1e-5 * std::max(1e-2, std::abs(pt.continuous[i]));
        auto at = [&](double dx) {
          auto q = pt;
          q.continuous[i] += dx;
          return p.value(q);
        };
        const double fd = (at(h) - at(-h)) / (2.0 * h);
        CHECK(std::abs(g[i] - fd) <= 1e-5 * std::abs(fd));
      }
    }
  }
}

TEST_SUITE("preset") {
  TEST_CASE("Double-Gauss has 18 continuous and 6 integer variables") {
    const auto t = preset("double_gauss");
    CHECK(t.n_continuous() == 18);
    CHECK(t.n_materials() == 6);
    CHECK(t.base.stop_index() >= 0);
    CHECK(t.reference_point().continuous[0] > 0.0);
  }

  TEST_CASE("triplet has 10 continuous and 3 integer variables") {
    const auto t = preset("triplet");
    CHECK(t.n_continuous() == 10);
    CHECK(t.n_materials() == 3);
  }

  TEST_CASE("extract inverts instantiate") {
    const auto t = preset("triplet");
    const auto p = t.reference_point();
    CHECK(t.extract(t.instantiate(p)) == p);
  }

  TEST_CASE("malformed presets are configuration errors") {
    const auto cat = catalog20();
    std::istringstream no_stop(
        "target_efl = 50\nepd = 10\nhalf_field_deg = 10\n[surfaces]\n20 3 N-BK7 5 1 5\n-20 solve AIR 5\n");
    CHECK_THROWS_AS(parse_preset(no_stop, *cat), ConfigError);
    std::istringstream bad_glass(
        "target_efl = 50\nepd = 10\nhalf_field_deg = 10\n[surfaces]\n20 3 NOPE 5 1 5\nstop 1 AIR 5 fixed\n"
        "-20 solve AIR 5\n");
    CHECK_THROWS_AS(parse_preset(bad_glass, *cat), ConfigError);
    std::istringstream no_key("epd = 10\n[surfaces]\n");
    CHECK_THROWS_AS(parse_preset(no_key, *cat), ConfigError);
  }
}
