// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/lens_problem.hpp"

#include <cmath>

#include "ldgea/error.hpp"

namespace ldgea {

LensProblem::LensProblem(LensTemplate tmpl, std::shared_ptr<const GlassCatalog> catalog,
                         MeritConfig merit, SearchSpaceConfig space)
    : tmpl_(std::move(tmpl)), catalog_(std::move(catalog)), merit_(merit), space_(space) {
  if (!catalog_ || catalog_->size() == 0) throw ArgumentError("LensProblem: empty catalog");
  if (tmpl_.n_continuous() + 1 > static_cast<std::size_t>(Dual::kMaxTangents)) {
    throw ArgumentError("LensProblem: too many continuous parameters for differentiation");
  }
}

DescriptorSpace LensProblem::descriptor_space() const {
  return DescriptorSpace::of(tmpl_, catalog_->size(), space_.positive_first_curvature);
}

double LensProblem::value(const DesignPoint& point) const {
  try {
    const double v = breakdown(point).total;
    return std::isfinite(v) ? v : INFINITY;
  } catch (const Error&) {
    return INFINITY;
  }
}

MeritBreakdown LensProblem::breakdown(const DesignPoint& point) const {
  return objective(tmpl_.instantiate(point), *catalog_, merit_);
}

double LensProblem::value_and_gradient(const DesignPoint& point, std::vector<double>& grad) const {
  double v = 0.0;
  grad = gradient(
      [&](std::span<const Dual> x) {
        const auto d = tmpl_.instantiate<Dual>(x, point.materials);
        const Dual f = objective(d, *catalog_, merit_).total;
        v = f.value();
        return f;
      },
      point.continuous);
  return v;
}

Objective LensProblem::subspace_objective(const Descriptor& x) const {
  return [this, materials = x.materials](std::span<const double> c) {
    return value(DesignPoint{{c.begin(), c.end()}, materials});
  };
}

DescriptorEvaluator LensProblem::descriptor_evaluator(const HveaConfig& base) const {
  return [this, base](const Descriptor& x, std::uint64_t seed, const std::atomic<bool>* stop) {
    HveaConfig cfg = base;
    cfg.seed = seed;
    cfg.stop = stop;
    const std::size_t nc = tmpl_.n_curvatures();
    cfg.describe = [this, x, nc](std::span<const double> c) {
      Descriptor d;
      for (std::size_t i = 0; i < nc; ++i) d.signs.push_back(c[i] > 0 ? 1 : (c[i] < 0 ? -1 : 0));
      d.materials = x.materials;
      return d;
    };
    return hvea_run(subspace_objective(x), x, subspace_box(x), cfg);
  };
}

MixedSpace LensProblem::baseline_space() const {
  MixedSpace s;
  s.catalog_size = static_cast<int>(catalog_->size());
  const double cmax = space_.max_curvature();
  for (std::size_t i = 0; i < tmpl_.n_curvatures(); ++i) {
    const bool first_positive = i == 0 && space_.positive_first_curvature;
    s.box.lower.push_back(first_positive ? space_.sign_margin : -cmax);
    s.box.upper.push_back(cmax);
    s.integer_mask.push_back(false);
  }
  for (const auto& iv : tmpl_.thickness_bounds) {
    s.box.lower.push_back(iv.lower);
    s.box.upper.push_back(iv.upper);
    s.integer_mask.push_back(false);
  }
  for (std::size_t m = 0; m < tmpl_.n_materials(); ++m) {
    s.box.lower.push_back(0.0);
    s.box.upper.push_back(static_cast<double>(catalog_->size() - 1));
    s.integer_mask.push_back(true);
  }
  return s;
}

DesignPoint LensProblem::baseline_point(std::span<const double> x) const {
  if (x.size() != tmpl_.n_continuous() + tmpl_.n_materials()) {
    throw ArgumentError("baseline_point: wrong vector length");
  }
  DesignPoint p;
  p.continuous.assign(x.begin(), x.begin() + static_cast<long>(tmpl_.n_continuous()));
  for (std::size_t m = 0; m < tmpl_.n_materials(); ++m) {
    p.materials.push_back(
        round_integer_coordinate(x[tmpl_.n_continuous() + m], static_cast<int>(catalog_->size())));
  }
  return p;
}

Objective LensProblem::baseline_objective() const {
  return [this](std::span<const double> x) { return value(baseline_point(x)); };
}

double LensProblem::solved_image_distance(const DesignPoint& point) const {
  const auto d = tmpl_.instantiate(point);
  return resolved_image_distance(d, *catalog_);
}

double LensProblem::refine_value_and_gradient(const DesignPoint& point,
                                              std::span<const double> vars,
                                              std::vector<double>* grad) const {
  const std::size_t nc = tmpl_.n_curvatures();
  if (vars.size() != nc + 1) throw ArgumentError("refine: expected curvatures plus image distance");
  if (grad == nullptr) {
    std::vector<double> c = point.continuous;
    std::copy(vars.begin(), vars.begin() + static_cast<long>(nc), c.begin());
    const double image = vars[nc];
    try {
      const auto d = tmpl_.instantiate<double>(c, point.materials, &image);
      const double v = objective(d, *catalog_, merit_).total;
      return std::isfinite(v) ? v : INFINITY;
    } catch (const Error&) {
      return INFINITY;
    }
  }
  double v = 0.0;
  *grad = gradient(
      [&](std::span<const Dual> x) {
        std::vector<Dual> c(point.continuous.begin(), point.continuous.end());
        for (std::size_t i = 0; i < nc; ++i) c[i] = x[i];
        const Dual image = x[nc];
        const auto d = tmpl_.instantiate<Dual>(c, point.materials, &image);
        const Dual f = objective(d, *catalog_, merit_).total;
        v = f.value();
        return f;
      },
      vars);
  return v;
}

}  // namespace ldgea
