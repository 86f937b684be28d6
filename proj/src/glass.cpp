// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/glass.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ldgea/error.hpp"

namespace ldgea {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& field, std::string_view origin, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ": bad number '" +
                      field + "'");
  }
}

// Quadratic through the three lines in the variable 1/lambda^2.
double interpolate_lines(const Glass& g, double lambda) {
  const double x = 1.0 / (lambda * lambda);
  const double xs[3] = {1.0 / (kLineF * kLineF), 1.0 / (kLineD * kLineD),
                        1.0 / (kLineC * kLineC)};
  const double ys[3] = {g.n_f, g.n_d, g.n_c};
  double n = 0.0;
  for (int i = 0; i < 3; ++i) {
    double l = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
    }
    n += ys[i] * l;
  }
  return n;
}

}  // namespace

double Glass::index(double wavelength_um) const {
  if (!(wavelength_um >= lambda_min_um && wavelength_um <= lambda_max_um)) {
    throw DomainError("glass '" + name + "': wavelength " + std::to_string(wavelength_um) +
                      " um outside validity range [" + std::to_string(lambda_min_um) + ", " +
                      std::to_string(lambda_max_um) + "]");
  }
  if (model == DispersionModel::kConstant) {
    if (wavelength_um == kLineD) return n_d;
    if (wavelength_um == kLineF) return n_f;
    if (wavelength_um == kLineC) return n_c;
    return interpolate_lines(*this, wavelength_um);
  }
  const double l2 = wavelength_um * wavelength_um;
  double n2 = 1.0;
  for (int i = 0; i < 3; ++i) n2 += b[i] * l2 / (l2 - c[i]);
  return std::sqrt(n2);
}

Glass Glass::constant(std::string name, double n_d, double n_f, double n_c) {
  Glass g;
  g.name = std::move(name);
  g.model = DispersionModel::kConstant;
  g.n_d = n_d;
  g.n_f = n_f;
  g.n_c = n_c;
  return g;
}

Glass Glass::sellmeier(std::string name, std::array<double, 3> b, std::array<double, 3> c) {
  Glass g;
  g.name = std::move(name);
  g.model = DispersionModel::kSellmeier;
  g.b = b;
  g.c = c;
  return g;
}

double refractive_index(const Glass* glass, double wavelength_um) {
  return glass == nullptr ? 1.0 : glass->index(wavelength_um);
}

GlassCatalog::GlassCatalog(std::vector<Glass> glasses) : glasses_(std::move(glasses)) {
  for (std::size_t i = 0; i < glasses_.size(); ++i) glasses_[i].id = static_cast<int>(i);
}

GlassCatalog GlassCatalog::parse(std::istream& in, std::string_view origin) {
  std::vector<Glass> out;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(trim(cell));
    auto fail = [&](const std::string& why) {
      return ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + why);
    };
    if (f.size() < 2) throw fail("expected name,model,...");
    std::vector<double> v;
    for (std::size_t i = 2; i < f.size(); ++i) v.push_back(parse_number(f[i], origin, line_no));
    Glass g;
    if (f[1] == "sellmeier") {
      if (v.size() != 8) throw fail("sellmeier needs 6 coefficients and a wavelength range");
      g = Glass::sellmeier(f[0], {v[0], v[1], v[2]}, {v[3], v[4], v[5]});
    } else if (f[1] == "constant") {
      if (v.size() != 5) throw fail("constant needs n_d,n_F,n_C and a wavelength range");
      g = Glass::constant(f[0], v[0], v[1], v[2]);
    } else {
      throw fail("unknown dispersion model '" + f[1] + "'");
    }
    g.lambda_min_um = v[v.size() - 2];
    g.lambda_max_um = v[v.size() - 1];
    if (!(g.lambda_min_um < g.lambda_max_um)) throw fail("empty wavelength range");
    for (double w : {g.lambda_min_um, kLineF, kLineD, kLineC, g.lambda_max_um}) {
      if (w < g.lambda_min_um || w > g.lambda_max_um) continue;
      const double n = g.index(w);
      if (!(std::isfinite(n) && n > 1.0)) throw fail("index must be finite and > 1");
    }
    out.push_back(std::move(g));
  }
  return GlassCatalog(std::move(out));
}

GlassCatalog GlassCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open glass catalog '" + path.string() + "'");
  return parse(in, path.string());
}

const Glass& GlassCatalog::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= glasses_.size()) {
    throw ArgumentError("glass id " + std::to_string(id) + " outside catalog of size " +
                        std::to_string(glasses_.size()));
  }
  return glasses_[static_cast<std::size_t>(id)];
}

std::optional<int> GlassCatalog::find(std::string_view name) const {
  for (const auto& g : glasses_) {
    if (g.name == name) return g.id;
  }
  return std::nullopt;
}

double GlassCatalog::index(int medium, double wavelength_um) const {
  if (medium == kAir) return 1.0;
  return at(medium).index(wavelength_um);
}

std::vector<int> GlassCatalog::index_rank() const {
  std::vector<int> order(glasses_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return glasses_[a].index(kLineD) < glasses_[b].index(kLineD);
  });
  std::vector<int> rank(glasses_.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

}  // namespace ldgea
