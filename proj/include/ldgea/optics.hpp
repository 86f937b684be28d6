// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Sequential geometric ray tracing through centred spherical surfaces.
//
// All kernels are templates over the scalar type so the same code path runs
// in plain double precision during search and on ldgea::Dual when exact
// derivatives are needed. Flow control only ever branches on values.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldgea/dual.hpp"
#include "ldgea/error.hpp"
#include "ldgea/glass.hpp"

namespace ldgea {

template <typename T>
struct Vec3 {
  T x{}, y{}, z{};

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(const T& s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
};

template <typename T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

enum class RayStatus : std::uint8_t {
  kAlive,
  kVignetted,
  kTotalInternalReflection,
  kNegativePath,  // direction turned back along the axis
  kMissedSurface,
};

const char* to_string(RayStatus s);

template <typename T>
struct RayT {
  Vec3<T> origin;
  Vec3<T> direction;  // unit length while alive
  double wavelength_um = kLineD;
  RayStatus status = RayStatus::kAlive;

  bool alive() const { return status == RayStatus::kAlive; }
};

template <typename T>
struct SurfaceT {
  T curvature{};               // 1/mm, 0 is flat
  double semi_diameter = 1.0;  // mm
  T thickness{};               // axial gap to the next surface, mm
  int medium_after = kAir;
  bool is_stop = false;
};

enum class ImageDistanceMode { kSolved, kExplicit };

template <typename T>
struct LensDesignT {
  std::vector<SurfaceT<T>> surfaces;
  ImageDistanceMode image_mode = ImageDistanceMode::kSolved;
  T image_distance{};  // last vertex to sensor when explicit
  std::vector<double> field_angles_deg{0.0};
  double entrance_pupil_diameter = 1.0;
  std::vector<double> wavelengths_um{kLineF, kLineD, kLineC};
  double primary_wavelength_um = kLineD;

  int stop_index() const {
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      if (surfaces[i].is_stop) return static_cast<int>(i);
    }
    return -1;
  }
};

using Surface = SurfaceT<double>;
using LensDesign = LensDesignT<double>;
using Ray = RayT<double>;

template <typename T>
struct TraceResultT {
  std::vector<Vec3<T>> points;        // global intersection points, one per surface reached
  std::optional<std::array<T, 2>> landing;
  RayStatus status = RayStatus::kAlive;
  int failed_surface = -1;
  std::vector<T> segment_lengths;  // signed ray parameter per traversed gap (incl. image gap)

  void clear() {
    points.clear();
    landing.reset();
    status = RayStatus::kAlive;
    failed_surface = -1;
    segment_lengths.clear();
  }
  bool alive() const { return landing.has_value(); }
};

using TraceResult = TraceResultT<double>;

/// Snell refraction in vector form. `normal` may face either way. Total
/// internal reflection is reported through the returned ray's status.
template <typename T>
RayT<T> refract(RayT<T> ray, Vec3<T> normal, double n1, double n2) {
  using std::sqrt;
  if (!ray.alive()) return ray;
  T cos_i = dot(normal, ray.direction);
  if (cos_i < T(0.0)) {
    normal = T(-1.0) * normal;
    cos_i = -cos_i;
  }
  if (n1 == n2) return ray;
  const double mu = n1 / n2;
  const T k = T(1.0) - mu * mu * (T(1.0) - cos_i * cos_i);
  if (k < T(0.0)) {
    ray.status = RayStatus::kTotalInternalReflection;
    return ray;
  }
  ray.direction = T(mu) * ray.direction + (sqrt(k) - T(mu) * cos_i) * normal;
  return ray;
}

/// Per-wavelength view of a design: vertex positions and media indices.
template <typename T>
struct PreparedSystem {
  struct Entry {
    T curvature;
    T vertex_z;
    double semi_diameter;
    double n_after;
    bool clips;
  };
  std::vector<Entry> surfaces;
  T image_z;
  double wavelength_um;
};

template <typename T>
PreparedSystem<T> prepare_system(const LensDesignT<T>& design, const GlassCatalog& catalog,
                                 double wavelength_um, const T& image_distance) {
  PreparedSystem<T> sys;
  sys.wavelength_um = wavelength_um;
  sys.surfaces.reserve(design.surfaces.size());
  T z(0.0);
  for (std::size_t i = 0; i < design.surfaces.size(); ++i) {
    const auto& s = design.surfaces[i];
    // The stop is not a clipping aperture: real rays are launched from the
    // paraxial entrance pupil, so pupil aberration must not vignette them.
    sys.surfaces.push_back({s.curvature, z, s.semi_diameter,
                            catalog.index(s.medium_after, wavelength_um), !s.is_stop});
    if (i + 1 < design.surfaces.size()) z = z + s.thickness;
  }
  sys.image_z = z + image_distance;
  return sys;
}

/// Core ray-surface loop. Fills `out` and returns the final status.
template <typename T>
RayStatus trace_prepared(const PreparedSystem<T>& sys, RayT<T> ray, TraceResultT<T>& out) {
  using std::sqrt;
  out.clear();
  double n_before = 1.0;
  for (std::size_t k = 0; k < sys.surfaces.size(); ++k) {
    const auto& s = sys.surfaces[k];
    const Vec3<T> p{ray.origin.x, ray.origin.y, ray.origin.z - s.vertex_z};
    const Vec3<T>& u = ray.direction;
    T t;
    if (value_of(s.curvature) == 0.0 && !(value_of(u.z) > 0.0)) {
      ray.status = RayStatus::kMissedSurface;
    } else {
      // At c = 0 this reduces exactly to the plane intersection -p.z / u.z
      // while still carrying the curvature derivative.
      const T b = u.z - s.curvature * dot(p, u);
      const T h = s.curvature * dot(p, p) - T(2.0) * p.z;
      const T disc = b * b - s.curvature * h;
      if (disc < T(0.0)) {
        ray.status = RayStatus::kMissedSurface;
      } else {
        const T den = b + sqrt(disc);
        if (!(value_of(den) > 0.0)) {
          ray.status = RayStatus::kMissedSurface;
        } else {
          t = h / den;
        }
      }
    }
    if (!ray.alive()) {
      out.status = ray.status;
      out.failed_surface = static_cast<int>(k);
      return ray.status;
    }
    const Vec3<T> q = p + t * u;
    if (k > 0) out.segment_lengths.push_back(t);
    out.points.push_back({q.x, q.y, q.z + s.vertex_z});
    if (s.clips && value_of(q.x * q.x + q.y * q.y) > s.semi_diameter * s.semi_diameter) {
      out.status = RayStatus::kVignetted;
      out.failed_surface = static_cast<int>(k);
      return out.status;
    }
    const Vec3<T> normal{-s.curvature * q.x, -s.curvature * q.y, T(1.0) - s.curvature * q.z};
    ray.origin = out.points.back();
    ray = refract(ray, normal, n_before, s.n_after);
    if (ray.alive() && !(value_of(ray.direction.z) > 0.0)) ray.status = RayStatus::kNegativePath;
    if (!ray.alive()) {
      out.status = ray.status;
      out.failed_surface = static_cast<int>(k);
      return ray.status;
    }
    n_before = s.n_after;
  }
  const T t = (sys.image_z - ray.origin.z) / ray.direction.z;
  out.segment_lengths.push_back(t);
  out.landing = std::array<T, 2>{ray.origin.x + t * ray.direction.x,
                                 ray.origin.y + t * ray.direction.y};
  out.status = RayStatus::kAlive;
  return out.status;
}

// ---------------------------------------------------------------------------
// Paraxial (y-u) analysis

template <typename T>
struct ParaxialRay {
  T y;
  T u;
};

/// Propagates a paraxial ray that starts at the first vertex with height y
/// and object-space slope u. Stops at surface `until` (the returned height is
/// at that vertex, before refraction) or after the last surface.
template <typename T>
ParaxialRay<T> paraxial_propagate(const LensDesignT<T>& design, const GlassCatalog& catalog,
                                  double wavelength_um, ParaxialRay<T> ray,
                                  int until = -1) {
  double n = 1.0;
  const int count = static_cast<int>(design.surfaces.size());
  for (int i = 0; i < count; ++i) {
    if (i == until) return ray;
    const auto& s = design.surfaces[i];
    const double n_after = catalog.index(s.medium_after, wavelength_um);
    ray.u = (T(n) * ray.u - ray.y * s.curvature * T(n_after - n)) / T(n_after);
    n = n_after;
    if (i + 1 < count) ray.y = ray.y + ray.u * s.thickness;
  }
  return ray;
}

template <typename T>
T effective_focal_length(const LensDesignT<T>& design, const GlassCatalog& catalog,
                         double wavelength_um) {
  const auto out = paraxial_propagate(design, catalog, wavelength_um, ParaxialRay<T>{T(1.0), T(0.0)});
  if (std::abs(value_of(out.u)) < 1e-12) throw NoPowerError("afocal system: no paraxial power");
  return T(-1.0) / out.u;
}

/// Distance after the last vertex at which the axial marginal ray from an
/// object at infinity crosses the axis.
template <typename T>
T paraxial_image_distance(const LensDesignT<T>& design, const GlassCatalog& catalog,
                          double wavelength_um) {
  const auto out = paraxial_propagate(design, catalog, wavelength_um, ParaxialRay<T>{T(1.0), T(0.0)});
  if (std::abs(value_of(out.u)) < 1e-12) throw NoPowerError("afocal system: no paraxial power");
  return -out.y / out.u;
}

/// Axial position of the paraxial entrance pupil relative to the first vertex.
template <typename T>
T entrance_pupil_position(const LensDesignT<T>& design, const GlassCatalog& catalog,
                          double wavelength_um) {
  const int stop = design.stop_index();
  if (stop <= 0) return T(0.0);
  const auto a = paraxial_propagate(design, catalog, wavelength_um, ParaxialRay<T>{T(1.0), T(0.0)}, stop);
  const auto b = paraxial_propagate(design, catalog, wavelength_um, ParaxialRay<T>{T(0.0), T(1.0)}, stop);
  if (std::abs(value_of(a.y)) < 1e-12) throw NoPowerError("stop is conjugate to infinity");
  return b.y / a.y;
}

/// Image distance actually used for a trace: solved at the primary wavelength
/// or taken from the design.
template <typename T>
T resolved_image_distance(const LensDesignT<T>& design, const GlassCatalog& catalog) {
  if (design.image_mode == ImageDistanceMode::kExplicit) return design.image_distance;
  return paraxial_image_distance(design, catalog, design.primary_wavelength_um);
}

/// Normalised pupil coordinates of a hexapolar grid: centre plus rings of
/// 6k points at radius k/(rings-1). Three rings give 1 + 6 + 12 = 19 points.
std::vector<std::array<double, 2>> hexapolar_pupil(int rings);

/// Real ray from an object at infinity, field angle in the y-z plane, passing
/// through normalised pupil point (px, py) on the paraxial entrance pupil.
template <typename T>
RayT<T> launch_ray(const T& pupil_z, double epd, double field_deg, double px, double py,
                   double wavelength_um, double start_z) {
  const double a = field_deg * std::numbers::pi / 180.0;
  const double r = 0.5 * epd;
  RayT<T> ray;
  ray.wavelength_um = wavelength_um;
  ray.direction = {T(0.0), T(std::sin(a)), T(std::cos(a))};
  const Vec3<T> through{T(px * r), T(py * r), pupil_z};
  const T s = (pupil_z - T(start_z)) / T(std::cos(a));
  ray.origin = through - s * ray.direction;
  return ray;
}

/// Launch plane guaranteed to lie in front of every first-surface sag.
template <typename T>
double launch_plane(const LensDesignT<T>& design, const T& pupil_z) {
  double max_sd = 0.0;
  for (const auto& s : design.surfaces) max_sd = std::max(max_sd, s.semi_diameter);
  return std::min(value_of(pupil_z), 0.0) - max_sd - 1.0;
}

/// Traces a single ray through a design, resolving the image distance first.
template <typename T>
TraceResultT<T> trace(const LensDesignT<T>& design, const GlassCatalog& catalog,
                      const RayT<T>& ray) {
  const T image = resolved_image_distance(design, catalog);
  const auto sys = prepare_system(design, catalog, ray.wavelength_um, image);
  TraceResultT<T> out;
  trace_prepared(sys, ray, out);
  return out;
}

/// Exact gradient of a scalar function of a parameter vector by forward-mode
/// differentiation. `fn` receives a span of Dual and returns a Dual.
template <typename Fn>
std::vector<double> gradient(Fn&& fn, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (n > Dual::kMaxTangents) {
    throw ArgumentError("gradient: " + std::to_string(n) + " parameters exceed the " +
                        std::to_string(Dual::kMaxTangents) + "-tangent limit");
  }
  std::vector<Dual> xd;
  xd.reserve(x.size());
  for (int i = 0; i < n; ++i) xd.push_back(Dual::variable(x[i], i, n));
  const Dual y = fn(std::span<const Dual>(xd));
  if (!std::isfinite(y.value())) throw EvaluationError("gradient: non-finite scalar", -1);
  std::vector<double> g(x.size());
  for (int i = 0; i < n; ++i) g[i] = y.tangent(i);
  return g;
}

/// Returns a copy with every length multiplied by `s`.
LensDesign scale_design(const LensDesign& design, double s);

/// Converts between scalar types (values only; tangents are dropped).
template <typename To, typename From>
LensDesignT<To> convert_design(const LensDesignT<From>& d) {
  LensDesignT<To> out;
  out.image_mode = d.image_mode;
  out.image_distance = To(value_of(d.image_distance));
  out.field_angles_deg = d.field_angles_deg;
  out.entrance_pupil_diameter = d.entrance_pupil_diameter;
  out.wavelengths_um = d.wavelengths_um;
  out.primary_wavelength_um = d.primary_wavelength_um;
  for (const auto& s : d.surfaces) {
    out.surfaces.push_back({To(value_of(s.curvature)), s.semi_diameter, To(value_of(s.thickness)),
                            s.medium_after, s.is_stop});
  }
  return out;
}

}  // namespace ldgea
