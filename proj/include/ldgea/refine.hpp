// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldgea/descriptor.hpp"
#include "ldgea/lens_problem.hpp"

namespace ldgea {

struct BfgsOptions {
  int max_iterations = 1000;
  double gradient_tol = 1e-6;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  /// Optional bounds; empty vectors mean unbounded.
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Returns f(x); fills `grad` when it is not null.
using ValueGradient = std::function<double(std::span<const double> x, std::vector<double>* grad)>;

struct BfgsResult {
  std::vector<double> x;
  double value = INFINITY;
  double initial_value = INFINITY;
  int iterations = 0;
  double gradient_norm = INFINITY;  // projected when bounds are set
  std::string reason;  // gradient-tol, max-iterations, line-search, non-finite-gradient
  int projections = 0;  // accepted steps that hit a bound
};

/// Projected BFGS with Armijo backtracking. Accepted steps never increase f.
BfgsResult bfgs_minimize(const ValueGradient& fg, std::span<const double> x0,
                         const BfgsOptions& opt);

struct RefineReport {
  Descriptor descriptor;
  DesignPoint input;
  double input_value = INFINITY;
  DesignPoint refined;
  double refined_image_distance = 0.0;
  double refined_value = INFINITY;
  int iterations = 0;
  double gradient_norm = INFINITY;
  double improvement = 1.0;  // input_value / refined_value
  std::string reason;
  int projections = 0;
};

/// Polishes curvatures and the image distance of one design, keeping every
/// curvature inside its sign box; thicknesses and glasses stay fixed.
RefineReport bfgs_refine(const LensProblem& problem, const DesignPoint& input,
                         BfgsOptions opt = {});

}  // namespace ldgea
