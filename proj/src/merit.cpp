// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/merit.hpp"

#include <cmath>

namespace ldgea {

double rms_spot(const std::vector<SpotPoints<double>>& per_field) {
  return std::sqrt(spot_mean_square(per_field));
}

Feasibility is_feasible(const LensTemplate& tmpl, const DesignPoint& point,
                        const SearchSpaceConfig& space, std::size_t catalog_size) {
  if (point.continuous.size() != tmpl.n_continuous() ||
      point.materials.size() != tmpl.n_materials()) {
    return {false, "shape"};
  }
  const std::size_t nc = tmpl.n_curvatures();
  for (std::size_t i = 0; i < tmpl.n_thicknesses(); ++i) {
    if (!(point.continuous[nc + i] >= 0.0)) return {false, "thickness"};
  }
  for (std::size_t i = 0; i < tmpl.n_thicknesses(); ++i) {
    const double t = point.continuous[nc + i];
    const auto& b = tmpl.thickness_bounds[i];
    if (t < b.lower || t > b.upper) return {false, "bounds"};
  }
  for (std::size_t i = 0; i < nc; ++i) {
    if (!(std::abs(point.continuous[i]) <= space.max_curvature())) return {false, "curvature"};
  }
  if (space.positive_first_curvature && nc > 0 && !(point.continuous[0] > 0.0)) {
    return {false, "first-curvature"};
  }
  for (int m : point.materials) {
    if (m < 0 || static_cast<std::size_t>(m) >= catalog_size) return {false, "material"};
  }
  return {};
}

}  // namespace ldgea
