// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldgea/lens_template.hpp"
#include "ldgea/types.hpp"

namespace ldgea {

/// Niche identity of a design: curvature sign pattern plus glass indices.
/// Thicknesses are deliberately not part of it.
struct Descriptor {
  std::vector<int> signs;      // -1, 0 or +1 per optimizable curvature
  std::vector<int> materials;  // catalog index per element

  /// Compact form "s1s2...|m1,m2,..." with signs written as + - 0.
  std::string to_string() const;
  static Descriptor parse(std::string_view text);

  friend auto operator<=>(const Descriptor&, const Descriptor&) = default;
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

Descriptor describe(const LensTemplate& tmpl, const DesignPoint& point);
Descriptor describe(const LensTemplate& tmpl, const LensDesign& design);

/// Default tolerance for comparing objective values: 1e-9 * max(1, |f|).
double equivalence_tolerance(double f);

/// Descriptor-equivalence with a tolerance in place of exact value equality.
bool equivalent(const Descriptor& a, const Descriptor& b, double f_a, double f_b, double tol);
bool equivalent(const LensTemplate& tmpl, const DesignPoint& a, const DesignPoint& b, double f_a,
                double f_b, double tol);

/// Shape of the descriptor space for one topology and catalog.
struct DescriptorSpace {
  std::size_t n_signs = 0;
  std::size_t n_materials = 0;
  std::size_t catalog_size = 0;
  bool positive_first = true;

  static DescriptorSpace of(const LensTemplate& tmpl, std::size_t catalog_size,
                            bool positive_first);
};

/// Fully factorised model over descriptors: one Bernoulli per sign and one
/// categorical per material slot.
struct DescriptorDistribution {
  std::vector<double> p_plus;                    // P(sign_j = +1)
  std::vector<std::vector<double>> categorical;  // per slot, sums to 1
  double floor = 0.0;

  static DescriptorDistribution uniform(const DescriptorSpace& space, double floor);

  /// Raises every probability to at least `floor` and renormalises.
  void apply_floor();
};

/// One independent draw; the first sign is forced to +1 when the space says so.
Descriptor sample(const DescriptorDistribution& dist, const DescriptorSpace& space, Rng& rng);

/// `count` draws; a duplicate of an earlier draw is redrawn up to
/// `max_retries` times and then accepted.
std::vector<Descriptor> sample_batch(const DescriptorDistribution& dist,
                                     const DescriptorSpace& space, std::size_t count, Rng& rng,
                                     int max_retries = 10);

/// UMDA step: p <- (1 - alpha) p + alpha * empirical marginals of `selected`,
/// factor by factor, then floored.
DescriptorDistribution update(const DescriptorDistribution& dist,
                              std::span<const Descriptor> selected, double alpha);

/// Exact KL(p || q) of two factorised models (sum of factor divergences).
double kl_divergence(const DescriptorDistribution& p, const DescriptorDistribution& q);

/// Probability that `sample` returns exactly `x`.
double probability(const DescriptorDistribution& dist, const DescriptorSpace& space,
                   const Descriptor& x);

/// Box over the continuous parameters that keeps every curvature sign fixed
/// to the descriptor's. Thickness bounds come from the template.
Box subspace_bounds(const Descriptor& x, const LensTemplate& tmpl, const SearchSpaceConfig& cfg);

/// Design point for a continuous vector inside a descriptor's subspace.
DesignPoint with_materials(std::span<const double> continuous, const Descriptor& x);

}  // namespace ldgea
