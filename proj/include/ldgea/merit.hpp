// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Composite lens merit: F = rms^2 + sum_k w_k P_k^2.
//
// P1  failed-ray fraction (vignetted, TIR, missed, turned back)
// P2  negative signed path between consecutive surfaces
// P3  centre thickness / air gap below the manufacturable minimum
// P4  free working distance below the minimum
// P5  relative focal-length deviation outside a dead zone
//
// Every penalty is a rectified, normalised violation so that P_k^2 is C1.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "ldgea/lens_template.hpp"
#include "ldgea/optics.hpp"

namespace ldgea {

struct MeritConfig {
  std::array<double, 5> weights{10.0, 1.0, 1.0, 1.0, 1.0};
  double target_efl = 95.5;
  double min_glass_thickness = 1.0;  // mm
  double min_air_gap = 0.2;          // mm
  double min_working_distance = 20.0;
  double vignetting_magnitude = 1.0;
  double efl_dead_zone = 1e-4;        // relative
  double negative_path_scale = 1.0;   // mm
  double quality_threshold = 0.5;
  int pupil_rings = 3;
};

struct RayCensus {
  int total = 0;
  int alive = 0;
  int vignetted = 0;
  int total_internal_reflection = 0;
  int missed = 0;
  int turned_back = 0;
  int empty_fields = 0;  // fields with no surviving ray

  int failed() const { return total - alive; }
  double failed_fraction() const { return total == 0 ? 0.0 : static_cast<double>(failed()) / total; }
};

template <typename T>
struct MeritBreakdownT {
  T mean_square{};  // rms^2, field averaged
  double rms = 0.0;
  std::array<T, 5> penalties{};
  T total{};
  RayCensus census;
};

using MeritBreakdown = MeritBreakdownT<double>;

/// Sums the merit in a fixed order: rms^2 first, then w1 P1^2 ... w5 P5^2.
template <typename T>
T assemble_merit(const T& mean_square, const std::array<T, 5>& p,
                 const std::array<double, 5>& w) {
  T f = mean_square;
  for (int k = 0; k < 5; ++k) f = f + T(w[k]) * p[k] * p[k];
  return f;
}

/// max(0, limit - value) / limit
template <typename T>
T shortfall(const T& value, double limit) {
  return value < T(limit) ? (T(limit) - value) / T(limit) : T(0.0);
}

template <typename T>
using SpotPoints = std::vector<std::array<T, 2>>;

/// Centroid-referenced mean-square radius of one field's points.
template <typename T>
T field_mean_square(const SpotPoints<T>& pts) {
  const double n = static_cast<double>(pts.size());
  T cx(0.0), cy(0.0);
  for (const auto& p : pts) {
    cx = cx + p[0];
    cy = cy + p[1];
  }
  cx = cx / T(n);
  cy = cy / T(n);
  T ms(0.0);
  for (const auto& p : pts) {
    const T dx = p[0] - cx;
    const T dy = p[1] - cy;
    ms = ms + dx * dx + dy * dy;
  }
  return ms / T(n);
}

/// Field-averaged mean square over fields that have at least one point.
template <typename T>
T spot_mean_square(const std::vector<SpotPoints<T>>& per_field) {
  T sum(0.0);
  int used = 0;
  for (const auto& pts : per_field) {
    if (pts.empty()) continue;
    sum = sum + field_mean_square(pts);
    ++used;
  }
  return used == 0 ? T(0.0) : sum / T(static_cast<double>(used));
}

/// RMS spot radius in mm; 0 when every field is fully vignetted.
double rms_spot(const std::vector<SpotPoints<double>>& per_field);

template <typename T>
MeritBreakdownT<T> objective(const LensDesignT<T>& design, const GlassCatalog& catalog,
                             const MeritConfig& cfg) {
  using std::abs;
  MeritBreakdownT<T> out;
  const auto bad_surface = [&]() {
    for (std::size_t i = 0; i < design.surfaces.size(); ++i) {
      const auto& s = design.surfaces[i];
      if (!std::isfinite(value_of(s.curvature)) || !std::isfinite(value_of(s.thickness))) {
        return static_cast<int>(i);
      }
    }
    return -1;
  };
  if (const int b = bad_surface(); b >= 0) {
    throw EvaluationError("non-finite parameter at surface " + std::to_string(b), b);
  }

  T efl, image, pupil_z;
  try {
    efl = effective_focal_length(design, catalog, design.primary_wavelength_um);
    image = resolved_image_distance(design, catalog);
    pupil_z = entrance_pupil_position(design, catalog, design.primary_wavelength_um);
  } catch (const NoPowerError& e) {
    throw EvaluationError(std::string("paraxial analysis failed: ") + e.what(), -1);
  }

  const auto pupil = hexapolar_pupil(cfg.pupil_rings);
  const double start_z = launch_plane(design, pupil_z);
  std::vector<SpotPoints<T>> spots(design.field_angles_deg.size());
  T negative_path(0.0);
  TraceResultT<T> tr;
  for (double wl : design.wavelengths_um) {
    const auto sys = prepare_system(design, catalog, wl, image);
    for (std::size_t f = 0; f < design.field_angles_deg.size(); ++f) {
      for (const auto& p : pupil) {
        const auto ray = launch_ray(pupil_z, design.entrance_pupil_diameter,
                                    design.field_angles_deg[f], p[0], p[1], wl, start_z);
        const RayStatus st = trace_prepared(sys, ray, tr);
        ++out.census.total;
        for (const auto& seg : tr.segment_lengths) {
          if (seg < T(0.0)) negative_path = negative_path - seg;
        }
        switch (st) {
          case RayStatus::kAlive:
            ++out.census.alive;
            spots[f].push_back(*tr.landing);
            break;
          case RayStatus::kVignetted: ++out.census.vignetted; break;
          case RayStatus::kTotalInternalReflection: ++out.census.total_internal_reflection; break;
          case RayStatus::kMissedSurface: ++out.census.missed; break;
          case RayStatus::kNegativePath: ++out.census.turned_back; break;
        }
      }
    }
  }
  for (const auto& s : spots) out.census.empty_fields += s.empty() ? 1 : 0;

  out.mean_square = spot_mean_square(spots);
  out.rms = std::sqrt(value_of(out.mean_square));

  out.penalties[0] = T(cfg.vignetting_magnitude * out.census.failed_fraction());
  out.penalties[1] = negative_path / T(cfg.negative_path_scale * out.census.total);
  T thin(0.0);
  for (std::size_t i = 0; i + 1 < design.surfaces.size(); ++i) {
    const auto& s = design.surfaces[i];
    const double limit = s.medium_after == kAir ? cfg.min_air_gap : cfg.min_glass_thickness;
    thin = thin + shortfall(s.thickness, limit);
  }
  out.penalties[2] = thin;
  out.penalties[3] = shortfall(image, cfg.min_working_distance);
  const T dev = abs((efl - T(cfg.target_efl)) / T(cfg.target_efl)) - T(cfg.efl_dead_zone);
  out.penalties[4] = dev > T(0.0) ? dev : T(0.0);

  out.total = assemble_merit(out.mean_square, out.penalties, cfg.weights);
  if (!std::isfinite(value_of(out.total))) {
    throw EvaluationError("non-finite merit value", bad_surface());
  }
  return out;
}

struct Feasibility {
  bool feasible = true;
  std::string reason = "ok";
};

/// Screens a parameter vector against the forbidden region: negative gaps,
/// thickness bounds, curvature cap, first-curvature sign and material range.
Feasibility is_feasible(const LensTemplate& tmpl, const DesignPoint& point,
                        const SearchSpaceConfig& space, std::size_t catalog_size);

}  // namespace ldgea
