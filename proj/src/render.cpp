// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ldgea {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<Point2> profile(double c, double h, double z0, int samples, bool downward) {
  std::vector<Point2> pts;
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double y = downward ? h - 2 * h * t : -h + 2 * h * t;
    pts.push_back({z0 + surface_sag(c, y), y});
  }
  return pts;
}

// light blue (low index) to deep violet (high index)
std::string rank_colour(int rank, int count) {
  const double t = count > 1 ? static_cast<double>(rank) / (count - 1) : 0.0;
  const int r = static_cast<int>(std::lround(190 + t * (70 - 190)));
  const int g = static_cast<int>(std::lround(225 + t * (40 - 225)));
  const int b = static_cast<int>(std::lround(250 + t * (150 - 250)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

double surface_sag(double c, double y) {
  const double q = 1.0 - c * c * y * y;
  if (q <= 0.0) return c == 0.0 ? 0.0 : 1.0 / c;
  return c * y * y / (1.0 + std::sqrt(q));
}

std::vector<double> vertex_positions(const LensDesign& d) {
  std::vector<double> z;
  double at = 0.0;
  for (const auto& s : d.surfaces) {
    z.push_back(at);
    at += s.thickness;
  }
  return z;
}

std::vector<ElementOutline> element_outlines(const LensDesign& d, int samples) {
  const auto z = vertex_positions(d);
  std::vector<ElementOutline> out;
  for (std::size_t i = 0; i + 1 < d.surfaces.size(); ++i) {
    const auto& a = d.surfaces[i];
    if (a.medium_after == kAir) continue;
    const auto& b = d.surfaces[i + 1];
    ElementOutline e;
    e.front_surface = static_cast<int>(i);
    e.medium = a.medium_after;
    const auto front = profile(a.curvature, a.semi_diameter, z[i], samples, true);
    const auto back = profile(b.curvature, b.semi_diameter, z[i + 1], samples, false);
    e.points.insert(e.points.end(), front.begin(), front.end());
    e.points.insert(e.points.end(), back.begin(), back.end());
    out.push_back(std::move(e));
  }
  return out;
}

std::string render_svg(const LensDesign& d, const GlassCatalog& catalog, const std::string& title) {
  const auto z = vertex_positions(d);
  double image_z = z.back();
  try {
    image_z += resolved_image_distance(d, catalog);
  } catch (const Error&) {
  }
  double h = 0.0;
  for (const auto& s : d.surfaces) h = std::max(h, s.semi_diameter);
  const double zmin = std::min(0.0, image_z) - 0.1 * h - 5.0;
  const double zmax = std::max(z.back(), image_z) + 0.1 * h + 5.0;
  const double scale = 800.0 / (zmax - zmin);
  const double width = 800.0;
  const double height = 2.0 * (1.25 * h) * scale + 60.0;
  const double cy = 30.0 + 1.25 * h * scale;
  auto X = [&](double zz) { return fmt((zz - zmin) * scale); };
  auto Y = [&](double yy) { return fmt(cy - yy * scale); };

  const auto ranks = catalog.index_rank();
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height)
      << "\">\n"
      << "<title>" << escape(title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"#ffffff\"/>\n"
      << "<line x1=\"0\" y1=\"" << fmt(cy) << "\" x2=\"" << fmt(width) << "\" y2=\"" << fmt(cy)
      << "\" stroke=\"#999999\" stroke-dasharray=\"6,4\" stroke-width=\"0.8\"/>\n";

  for (const auto& e : element_outlines(d)) {
    const int rank = e.medium >= 0 && static_cast<std::size_t>(e.medium) < ranks.size()
                         ? ranks[e.medium]
                         : 0;
    svg << "<polygon fill=\"" << rank_colour(rank, static_cast<int>(catalog.size()))
        << "\" stroke=\"#1a1a1a\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < e.points.size(); ++k) {
      svg << (k ? " " : "") << X(e.points[k].z) << ',' << Y(e.points[k].y);
    }
    svg << "\"/>\n";
    const double mid = 0.5 * (z[e.front_surface] + z[e.front_surface + 1]);
    const double sd = d.surfaces[e.front_surface].semi_diameter;
    const std::string name =
        e.medium >= 0 && static_cast<std::size_t>(e.medium) < catalog.size()
            ? catalog.at(e.medium).name
            : std::string("?");
    svg << "<text x=\"" << X(mid) << "\" y=\"" << Y(-sd - 0.08 * h - 8.0 / scale)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << escape(name) << "</text>\n";
  }

  // Rays at the primary wavelength: chief and marginal rays of every field.
  try {
    const double pupil_z = entrance_pupil_position(d, catalog, d.primary_wavelength_um);
    const double start = launch_plane(d, pupil_z);
    const char* colours[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    for (std::size_t f = 0; f < d.field_angles_deg.size(); ++f) {
      for (double py : {-1.0, 0.0, 1.0}) {
        const auto ray = launch_ray(pupil_z, d.entrance_pupil_diameter, d.field_angles_deg[f],
                                    0.0, py, d.primary_wavelength_um, start);
        const auto tr = trace(d, catalog, ray);
        if (tr.points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << colours[f % 5]
            << "\" stroke-width=\"0.6\" points=\"";
        const double z0 = std::max(zmin, -0.1 * h - 5.0);
        const double t0 = (z0 - ray.origin.z) / ray.direction.z;
        svg << X(z0) << ',' << Y(ray.origin.y + t0 * ray.direction.y);
        for (const auto& p : tr.points) svg << ' ' << X(p.z) << ',' << Y(p.y);
        if (tr.landing) svg << ' ' << X(image_z) << ',' << Y((*tr.landing)[1]);
        svg << "\"/>\n";
      }
    }
  } catch (const Error&) {
  }

  for (std::size_t i = 0; i < d.surfaces.size(); ++i) {
    if (!d.surfaces[i].is_stop) continue;
    const double sd = d.surfaces[i].semi_diameter;
    for (double sgn : {1.0, -1.0}) {
      svg << "<line x1=\"" << X(z[i]) << "\" y1=\"" << Y(sgn * sd) << "\" x2=\"" << X(z[i])
          << "\" y2=\"" << Y(sgn * (sd + 0.12 * h)) << "\" stroke=\"#000000\" stroke-width=\"2\"/>\n";
    }
  }
  svg << "<line x1=\"" << X(image_z) << "\" y1=\"" << Y(1.1 * h) << "\" x2=\"" << X(image_z)
      << "\" y2=\"" << Y(-1.1 * h) << "\" stroke=\"#444444\" stroke-width=\"1.5\"/>\n";
  svg << "<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" << escape(title)
      << "</text>\n</svg>\n";
  return svg.str();
}

}  // namespace ldgea
