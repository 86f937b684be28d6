// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ldgea/glass.hpp"
#include "ldgea/optics.hpp"

namespace ldgea {

struct Point2 {
  double z = 0.0;
  double y = 0.0;
};

/// Sag of a spherical surface at height y (0 beyond the hemisphere).
double surface_sag(double curvature, double y);

/// Axial position of every surface vertex, first surface at z = 0.
std::vector<double> vertex_positions(const LensDesign& d);

/// Closed outline of each glass element in the meridional plane: front
/// profile top to bottom, then back profile bottom to top.
struct ElementOutline {
  int front_surface = 0;
  int medium = kAir;
  std::vector<Point2> points;
};
std::vector<ElementOutline> element_outlines(const LensDesign& d, int samples = 32);

/// SVG 1.1 cross-section with elements coloured by the catalog's sorted
/// refractive-index rank and labelled with glass names.
std::string render_svg(const LensDesign& d, const GlassCatalog& catalog, const std::string& title);

}  // namespace ldgea
