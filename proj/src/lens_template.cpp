// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/lens_template.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace ldgea {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> parse_list(const std::string& value, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(value);
  for (std::string cell; std::getline(ss, cell, ',');) {
    try {
      out.push_back(std::stod(trim(cell)));
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad number list '" + value + "'");
    }
  }
  return out;
}

double number(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": bad number '" + tok + "'");
  }
}

}  // namespace

DesignPoint LensTemplate::reference_point() const { return extract(base); }

DesignPoint LensTemplate::extract(const LensDesign& design) const {
  if (design.surfaces.size() != base.surfaces.size()) {
    throw ArgumentError("template '" + name + "': surface count mismatch");
  }
  DesignPoint p;
  for (int s : curvature_surfaces) p.continuous.push_back(design.surfaces[s].curvature);
  for (int s : thickness_gaps) p.continuous.push_back(design.surfaces[s].thickness);
  for (int s : element_gaps) p.materials.push_back(design.surfaces[s].medium_after);
  return p;
}

LensTemplate parse_preset(std::istream& in, const GlassCatalog& catalog, std::string_view origin) {
  LensTemplate t;
  std::map<std::string, std::string> keys;
  struct Row {
    std::vector<std::string> tok;
    int line;
  };
  std::vector<Row> rows;
  bool in_table = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line == "[surfaces]") {
      in_table = true;
      continue;
    }
    if (!in_table) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
      }
      keys[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    } else {
      Row r{{}, line_no};
      std::stringstream ss(line);
      for (std::string tok; ss >> tok;) r.tok.push_back(tok);
      rows.push_back(std::move(r));
    }
  }
  const std::string where(origin);
  auto need = [&](const char* key) -> const std::string& {
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where + ": missing key '" + key + "'");
    return it->second;
  };
  t.name = keys.count("name") ? keys["name"] : std::string("unnamed");
  t.target_efl = number(need("target_efl"), where);
  t.base.entrance_pupil_diameter = number(need("epd"), where);
  const double half_field = number(need("half_field_deg"), where);
  std::vector<double> fractions{0.0, 0.7, 1.0};
  if (keys.count("field_fractions")) fractions = parse_list(keys["field_fractions"], where);
  t.base.field_angles_deg.clear();
  for (double f : fractions) t.base.field_angles_deg.push_back(f * half_field);
  if (keys.count("wavelengths")) t.base.wavelengths_um = parse_list(keys["wavelengths"], where);
  if (keys.count("primary_wavelength")) {
    t.base.primary_wavelength_um = number(keys["primary_wavelength"], where);
  }
  if (rows.size() < 2) throw ConfigError(where + ": need at least two surfaces");

  int stops = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string at = where + ":" + std::to_string(r.line);
    const bool last = i + 1 == rows.size();
    if (r.tok.size() < 4) throw ConfigError(at + ": expected radius thickness medium semi_diameter");
    Surface s;
    if (r.tok[0] == "stop") {
      s.is_stop = true;
      ++stops;
    } else if (r.tok[0] != "inf") {
      const double radius = number(r.tok[0], at);
      if (radius == 0.0) throw ConfigError(at + ": zero radius");
      s.curvature = 1.0 / radius;
    }
    if (r.tok[2] == "AIR") {
      s.medium_after = kAir;
    } else {
      const auto id = catalog.find(r.tok[2]);
      if (!id) throw ConfigError(at + ": glass '" + r.tok[2] + "' not in catalog");
      s.medium_after = *id;
    }
    s.semi_diameter = number(r.tok[3], at);
    if (!(s.semi_diameter > 0.0)) throw ConfigError(at + ": semi-diameter must be positive");
    if (last) {
      if (s.medium_after != kAir) throw ConfigError(at + ": image space must be AIR");
      if (r.tok[1] == "solve") {
        t.base.image_mode = ImageDistanceMode::kSolved;
      } else {
        t.base.image_mode = ImageDistanceMode::kExplicit;
        t.base.image_distance = number(r.tok[1], at);
      }
    } else {
      s.thickness = number(r.tok[1], at);
      if (s.thickness < 0.0) throw ConfigError(at + ": negative thickness");
      if (r.tok.size() == 5 && r.tok[4] == "fixed") {
        // held constant
      } else if (r.tok.size() == 6) {
        const Interval b{number(r.tok[4], at), number(r.tok[5], at)};
        if (!(b.lower < b.upper) || b.lower < 0.0) throw ConfigError(at + ": bad thickness bounds");
        t.thickness_gaps.push_back(static_cast<int>(i));
        t.thickness_bounds.push_back(b);
      } else {
        throw ConfigError(at + ": gap needs 'lo hi' bounds or 'fixed'");
      }
    }
    if (!s.is_stop) t.curvature_surfaces.push_back(static_cast<int>(i));
    if (s.medium_after != kAir) t.element_gaps.push_back(static_cast<int>(i));
    t.base.surfaces.push_back(s);
  }
  if (stops != 1) throw ConfigError(where + ": exactly one stop surface required");
  if (t.base.surfaces.front().is_stop) throw ConfigError(where + ": first surface cannot be the stop");
  return t;
}

LensTemplate load_preset(const std::filesystem::path& path, const GlassCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lens preset '" + path.string() + "'");
  return parse_preset(in, catalog, path.string());
}

}  // namespace ldgea
