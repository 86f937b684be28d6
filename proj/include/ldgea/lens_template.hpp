// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldgea/error.hpp"
#include "ldgea/optics.hpp"

namespace ldgea {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// A continuous parameter vector plus the integer material indices.
///
/// Continuous layout: optimizable curvatures first, then free gaps, in
/// surface order. The image distance is not part of it (solved paraxially)
/// unless a caller instantiates with an explicit one.
struct DesignPoint {
  std::vector<double> continuous;
  std::vector<int> materials;

  friend bool operator==(const DesignPoint&, const DesignPoint&) = default;
};

/// Fixed lens topology with a reference prescription and parameter bounds.
class LensTemplate {
 public:
  std::string name;
  LensDesign base;
  double target_efl = 0.0;
  std::vector<int> curvature_surfaces;  // every non-stop surface
  std::vector<int> thickness_gaps;      // surfaces whose following gap is free
  std::vector<Interval> thickness_bounds;
  std::vector<int> element_gaps;  // surfaces followed by glass, one per element

  std::size_t n_curvatures() const { return curvature_surfaces.size(); }
  std::size_t n_thicknesses() const { return thickness_gaps.size(); }
  std::size_t n_materials() const { return element_gaps.size(); }
  std::size_t n_continuous() const { return n_curvatures() + n_thicknesses(); }

  DesignPoint reference_point() const;

  /// Builds the design for a parameter vector. With `explicit_image` the
  /// image distance is that value instead of the paraxial solve.
  template <typename T>
  LensDesignT<T> instantiate(std::span<const T> continuous, std::span<const int> materials,
                             const T* explicit_image = nullptr) const {
    if (continuous.size() != n_continuous() || materials.size() != n_materials()) {
      throw ArgumentError("template '" + name + "': expected " + std::to_string(n_continuous()) +
                          " continuous and " + std::to_string(n_materials()) +
                          " integer parameters");
    }
    LensDesignT<T> d = convert_design<T>(base);
    for (std::size_t i = 0; i < curvature_surfaces.size(); ++i) {
      d.surfaces[curvature_surfaces[i]].curvature = continuous[i];
    }
    for (std::size_t i = 0; i < thickness_gaps.size(); ++i) {
      d.surfaces[thickness_gaps[i]].thickness = continuous[n_curvatures() + i];
    }
    for (std::size_t i = 0; i < element_gaps.size(); ++i) {
      d.surfaces[element_gaps[i]].medium_after = materials[i];
    }
    if (explicit_image != nullptr) {
      d.image_mode = ImageDistanceMode::kExplicit;
      d.image_distance = *explicit_image;
    }
    return d;
  }

  LensDesign instantiate(const DesignPoint& p) const {
    return instantiate<double>(p.continuous, p.materials);
  }

  /// Reads the parameter vector back out of a design with this topology.
  DesignPoint extract(const LensDesign& design) const;
};

/// Preset file: `key = value` header lines, then a `[surfaces]` table with
/// one row per surface: radius thickness medium semi_diameter [lo hi|fixed].
/// Radius may be `inf` (flat) or `stop`; the last row's thickness is the
/// image distance or `solve`.
LensTemplate parse_preset(std::istream& in, const GlassCatalog& catalog,
                          std::string_view origin = "<stream>");
LensTemplate load_preset(const std::filesystem::path& path, const GlassCatalog& catalog);

}  // namespace ldgea

namespace ldgea {

/// Search-space rules shared by feasibility screening and descriptor boxes.
struct SearchSpaceConfig {
  double min_radius_mm = 4.0;     // |radius| >= this, i.e. |c| <= 1/min_radius
  double sign_margin = 1e-4;      // curvature boxes exclude (-margin, margin)
  bool positive_first_curvature = true;

  double max_curvature() const { return 1.0 / min_radius_mm; }
};

}  // namespace ldgea
