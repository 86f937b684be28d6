// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ldgea/error.hpp"

namespace ldgea {

namespace {

int sign_of(double c) { return c > 0.0 ? 1 : (c < 0.0 ? -1 : 0); }

double xlogy(double p, double q) {
  if (p <= 0.0) return 0.0;
  if (q <= 0.0) return INFINITY;
  return p * std::log(p / q);
}

}  // namespace

std::string Descriptor::to_string() const {
  std::string s;
  s.reserve(signs.size() + 1 + 4 * materials.size());
  for (int v : signs) s.push_back(v > 0 ? '+' : (v < 0 ? '-' : '0'));
  s.push_back('|');
  for (std::size_t i = 0; i < materials.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(materials[i]);
  }
  return s;
}

Descriptor Descriptor::parse(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw ArgumentError("descriptor '" + std::string(text) + "': missing '|'");
  }
  Descriptor d;
  for (char ch : text.substr(0, bar)) {
    switch (ch) {
      case '+': d.signs.push_back(1); break;
      case '-': d.signs.push_back(-1); break;
      case '0': d.signs.push_back(0); break;
      default: throw ArgumentError("descriptor '" + std::string(text) + "': bad sign character");
    }
  }
  const std::string rest(text.substr(bar + 1));
  if (!rest.empty()) {
    std::stringstream ss(rest);
    for (std::string cell; std::getline(ss, cell, ',');) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size() || v < 0) {
        throw ArgumentError("descriptor '" + std::string(text) + "': bad material index");
      }
      d.materials.push_back(v);
    }
  }
  return d;
}

Descriptor describe(const LensTemplate& tmpl, const DesignPoint& point) {
  if (point.continuous.size() != tmpl.n_continuous() ||
      point.materials.size() != tmpl.n_materials()) {
    throw ArgumentError("describe: point does not match template '" + tmpl.name + "'");
  }
  Descriptor d;
  for (std::size_t i = 0; i < tmpl.n_curvatures(); ++i) {
    d.signs.push_back(sign_of(point.continuous[i]));
  }
  d.materials = point.materials;
  return d;
}

Descriptor describe(const LensTemplate& tmpl, const LensDesign& design) {
  return describe(tmpl, tmpl.extract(design));
}

double equivalence_tolerance(double f) { return 1e-9 * std::max(1.0, std::abs(f)); }

bool equivalent(const Descriptor& a, const Descriptor& b, double f_a, double f_b, double tol) {
  return a == b && std::abs(f_a - f_b) <= tol;
}

bool equivalent(const LensTemplate& tmpl, const DesignPoint& a, const DesignPoint& b, double f_a,
                double f_b, double tol) {
  return equivalent(describe(tmpl, a), describe(tmpl, b), f_a, f_b, tol);
}

DescriptorSpace DescriptorSpace::of(const LensTemplate& tmpl, std::size_t catalog_size,
                                    bool positive_first) {
  if (catalog_size == 0) throw ArgumentError("descriptor space: empty catalog");
  return {tmpl.n_curvatures(), tmpl.n_materials(), catalog_size, positive_first};
}

DescriptorDistribution DescriptorDistribution::uniform(const DescriptorSpace& space,
                                                       double floor) {
  DescriptorDistribution d;
  d.floor = floor;
  d.p_plus.assign(space.n_signs, 0.5);
  d.categorical.assign(space.n_materials,
                       std::vector<double>(space.catalog_size, 1.0 / space.catalog_size));
  return d;
}

void DescriptorDistribution::apply_floor() {
  for (double& p : p_plus) {
    double hi = std::max(p, floor);
    double lo = std::max(1.0 - p, floor);
    p = hi / (hi + lo);
  }
  for (auto& cat : categorical) {
    double sum = 0.0;
    for (double& q : cat) {
      q = std::max(q, floor);
      sum += q;
    }
    for (double& q : cat) q /= sum;
  }
}

Descriptor sample(const DescriptorDistribution& dist, const DescriptorSpace& space, Rng& rng) {
  Descriptor d;
  d.signs.resize(space.n_signs);
  for (std::size_t j = 0; j < space.n_signs; ++j) {
    const double u = uniform01(rng);
    d.signs[j] = (j == 0 && space.positive_first) ? 1 : (u < dist.p_plus[j] ? 1 : -1);
  }
  d.materials.resize(space.n_materials);
  for (std::size_t m = 0; m < space.n_materials; ++m) {
    const auto& cat = dist.categorical[m];
    const double u = uniform01(rng);
    double acc = 0.0;
    int pick = static_cast<int>(cat.size()) - 1;
    for (std::size_t k = 0; k < cat.size(); ++k) {
      acc += cat[k];
      if (u < acc) {
        pick = static_cast<int>(k);
        break;
      }
    }
    d.materials[m] = pick;
  }
  return d;
}

std::vector<Descriptor> sample_batch(const DescriptorDistribution& dist,
                                     const DescriptorSpace& space, std::size_t count, Rng& rng,
                                     int max_retries) {
  std::vector<Descriptor> out;
  std::set<Descriptor> seen;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Descriptor d = sample(dist, space, rng);
    for (int r = 0; r < max_retries && seen.count(d); ++r) d = sample(dist, space, rng);
    seen.insert(d);
    out.push_back(std::move(d));
  }
  return out;
}

DescriptorDistribution update(const DescriptorDistribution& dist,
                              std::span<const Descriptor> selected, double alpha) {
  if (selected.empty()) throw ArgumentError("update: empty selection");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("update: alpha outside [0, 1]");
  const double n = static_cast<double>(selected.size());
  DescriptorDistribution next = dist;
  for (std::size_t j = 0; j < dist.p_plus.size(); ++j) {
    double plus = 0.0;
    for (const auto& d : selected) plus += d.signs.at(j) > 0 ? 1.0 : 0.0;
    next.p_plus[j] = (1.0 - alpha) * dist.p_plus[j] + alpha * plus / n;
  }
  for (std::size_t m = 0; m < dist.categorical.size(); ++m) {
    std::vector<double> freq(dist.categorical[m].size(), 0.0);
    for (const auto& d : selected) {
      const int k = d.materials.at(m);
      if (k < 0 || static_cast<std::size_t>(k) >= freq.size()) {
        throw ArgumentError("update: material index out of range");
      }
      freq[k] += 1.0;
    }
    for (std::size_t k = 0; k < freq.size(); ++k) {
      next.categorical[m][k] = (1.0 - alpha) * dist.categorical[m][k] + alpha * freq[k] / n;
    }
  }
  next.apply_floor();
  return next;
}

double kl_divergence(const DescriptorDistribution& p, const DescriptorDistribution& q) {
  if (p.p_plus.size() != q.p_plus.size() || p.categorical.size() != q.categorical.size()) {
    throw ArgumentError("kl_divergence: shape mismatch");
  }
  double kl = 0.0;
  for (std::size_t j = 0; j < p.p_plus.size(); ++j) {
    kl += xlogy(p.p_plus[j], q.p_plus[j]) + xlogy(1.0 - p.p_plus[j], 1.0 - q.p_plus[j]);
  }
  for (std::size_t m = 0; m < p.categorical.size(); ++m) {
    if (p.categorical[m].size() != q.categorical[m].size()) {
      throw ArgumentError("kl_divergence: shape mismatch");
    }
    for (std::size_t k = 0; k < p.categorical[m].size(); ++k) {
      kl += xlogy(p.categorical[m][k], q.categorical[m][k]);
    }
  }
  return kl;
}

double probability(const DescriptorDistribution& dist, const DescriptorSpace& space,
                   const Descriptor& x) {
  double pr = 1.0;
  for (std::size_t j = 0; j < space.n_signs; ++j) {
    if (j == 0 && space.positive_first) {
      if (x.signs[j] != 1) return 0.0;
      continue;
    }
    pr *= x.signs[j] > 0 ? dist.p_plus[j] : 1.0 - dist.p_plus[j];
  }
  for (std::size_t m = 0; m < space.n_materials; ++m) pr *= dist.categorical[m][x.materials[m]];
  return pr;
}

Box subspace_bounds(const Descriptor& x, const LensTemplate& tmpl, const SearchSpaceConfig& cfg) {
  if (x.signs.size() != tmpl.n_curvatures() || x.materials.size() != tmpl.n_materials()) {
    throw ArgumentError("subspace_bounds: descriptor '" + x.to_string() +
                        "' does not match template '" + tmpl.name + "'");
  }
  const double cmax = cfg.max_curvature();
  if (!(cfg.sign_margin > 0.0 && cfg.sign_margin < cmax)) {
    throw ArgumentError("subspace_bounds: sign margin must lie in (0, max curvature)");
  }
  Box box;
  for (std::size_t i = 0; i < x.signs.size(); ++i) {
    if (x.signs[i] == 0) {
      throw ArgumentError("subspace_bounds: zero sign in '" + x.to_string() + "'");
    }
    if (i == 0 && cfg.positive_first_curvature && x.signs[i] < 0) {
      throw ArgumentError("subspace_bounds: first curvature must be positive");
    }
    box.lower.push_back(x.signs[i] > 0 ? cfg.sign_margin : -cmax);
    box.upper.push_back(x.signs[i] > 0 ? cmax : -cfg.sign_margin);
  }
  for (const auto& iv : tmpl.thickness_bounds) {
    box.lower.push_back(iv.lower);
    box.upper.push_back(iv.upper);
  }
  return box;
}

DesignPoint with_materials(std::span<const double> continuous, const Descriptor& x) {
  return {std::vector<double>(continuous.begin(), continuous.end()), x.materials};
}

}  // namespace ldgea
