// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ldgea/descriptor.hpp"
#include "ldgea/evostrat.hpp"
#include "ldgea/hvea.hpp"
#include "ldgea/ldgea.hpp"
#include "ldgea/lens_template.hpp"
#include "ldgea/merit.hpp"

namespace ldgea {

/// Binds a lens template, a glass catalog and the merit settings into the
/// objectives used by the optimisers. Immutable and thread-safe.
class LensProblem {
 public:
  LensProblem(LensTemplate tmpl, std::shared_ptr<const GlassCatalog> catalog, MeritConfig merit,
              SearchSpaceConfig space);

  const LensTemplate& lens() const { return tmpl_; }
  const GlassCatalog& catalog() const { return *catalog_; }
  const MeritConfig& merit() const { return merit_; }
  const SearchSpaceConfig& space() const { return space_; }

  DescriptorSpace descriptor_space() const;

  /// Merit value; +inf when the design cannot be evaluated.
  double value(const DesignPoint& point) const;
  /// Full breakdown; throws EvaluationError when the design cannot be evaluated.
  MeritBreakdown breakdown(const DesignPoint& point) const;
  /// Value and gradient with respect to the continuous parameters.
  double value_and_gradient(const DesignPoint& point, std::vector<double>& grad) const;

  /// Objective over the continuous parameters with the descriptor's glasses.
  Objective subspace_objective(const Descriptor& x) const;
  Box subspace_box(const Descriptor& x) const { return subspace_bounds(x, tmpl_, space_); }
  DescriptorEvaluator descriptor_evaluator(const HveaConfig& base) const;

  /// Mixed space for the baseline: all curvatures, free gaps, then one
  /// integer coordinate per element.
  MixedSpace baseline_space() const;
  Objective baseline_objective() const;
  DesignPoint baseline_point(std::span<const double> x) const;

  /// Refinement variables: curvatures then an explicit image distance.
  double refine_value_and_gradient(const DesignPoint& point, std::span<const double> vars,
                                   std::vector<double>* grad) const;
  double solved_image_distance(const DesignPoint& point) const;

 private:
  LensTemplate tmpl_;
  std::shared_ptr<const GlassCatalog> catalog_;
  MeritConfig merit_;
  SearchSpaceConfig space_;
};

}  // namespace ldgea
