// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/optics.hpp"

namespace ldgea {

const char* to_string(RayStatus s) {
  switch (s) {
    case RayStatus::kAlive: return "alive";
    case RayStatus::kVignetted: return "vignetted";
    case RayStatus::kTotalInternalReflection: return "total-internal-reflection";
    case RayStatus::kNegativePath: return "negative-path";
    case RayStatus::kMissedSurface: return "missed-surface";
  }
  return "unknown";
}

std::vector<std::array<double, 2>> hexapolar_pupil(int rings) {
  if (rings < 1) throw ArgumentError("hexapolar_pupil: need at least one ring");
  std::vector<std::array<double, 2>> pts{{0.0, 0.0}};
  for (int k = 1; k < rings; ++k) {
    const double r = static_cast<double>(k) / (rings - 1);
    const int count = 6 * k;
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * j / count;
      pts.push_back({r * std::sin(a), r * std::cos(a)});
    }
  }
  return pts;
}

LensDesign scale_design(const LensDesign& design, double s) {
  LensDesign out = design;
  for (auto& surf : out.surfaces) {
    surf.curvature /= s;
    surf.thickness *= s;
    surf.semi_diameter *= s;
  }
  out.image_distance *= s;
  out.entrance_pupil_diameter *= s;
  return out;
}

}  // namespace ldgea
