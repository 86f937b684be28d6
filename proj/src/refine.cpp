// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/refine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ldgea/error.hpp"

namespace ldgea {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Bounds {
  VectorXd lo, hi;
  bool active = false;

  VectorXd project(const VectorXd& x) const {
    return active ? VectorXd(x.cwiseMax(lo).cwiseMin(hi)) : x;
  }
  double projected_gradient_norm(const VectorXd& x, const VectorXd& g) const {
    return active ? (project(x - g) - x).norm() : g.norm();
  }
};

}  // namespace

BfgsResult bfgs_minimize(const ValueGradient& fg, std::span<const double> x0,
                         const BfgsOptions& opt) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  Bounds b;
  if (!opt.lower.empty() || !opt.upper.empty()) {
    if (opt.lower.size() != x0.size() || opt.upper.size() != x0.size()) {
      throw ArgumentError("bfgs_minimize: bounds do not match the dimension");
    }
    b.active = true;
    b.lo = Eigen::Map<const VectorXd>(opt.lower.data(), n);
    b.hi = Eigen::Map<const VectorXd>(opt.upper.data(), n);
  }
  VectorXd x = b.project(Eigen::Map<const VectorXd>(x0.data(), n));
  std::vector<double> gbuf;
  auto eval = [&](const VectorXd& p, VectorXd* g) {
    const double v = fg(std::span<const double>(p.data(), static_cast<std::size_t>(n)),
                        g ? &gbuf : nullptr);
    if (g) *g = Eigen::Map<const VectorXd>(gbuf.data(), n);
    return v;
  };

  BfgsResult r;
  VectorXd g(n);
  double f = eval(x, &g);
  r.initial_value = f;
  if (!std::isfinite(f)) throw ArgumentError("bfgs_minimize: objective not finite at the start");
  MatrixXd h = MatrixXd::Identity(n, n);
  bool scaled = false;

  while (true) {
    if (!g.allFinite()) {
      r.reason = "non-finite-gradient";
      break;
    }
    r.gradient_norm = b.projected_gradient_norm(x, g);
    if (r.gradient_norm < opt.gradient_tol) {
      r.reason = "gradient-tol";
      break;
    }
    if (r.iterations >= opt.max_iterations) {
      r.reason = "max-iterations";
      break;
    }
    VectorXd d = -h * g;
    if (b.active) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lo = x[i] <= b.lo[i] && g[i] > 0;
        const bool at_hi = x[i] >= b.hi[i] && g[i] < 0;
        if (at_lo || at_hi) d[i] = 0.0;
      }
    }
    if (!(g.dot(d) < 0)) {
      h.setIdentity();
      d = -g;
      if (b.active) d = b.project(x + d) - x;
    }
    double step = 1.0;
    bool accepted = false;
    VectorXd xn, gn(n);
    double fn = INFINITY;
    for (int k = 0; k <= opt.max_backtracks; ++k, step *= opt.backtrack) {
      xn = b.project(x + step * d);
      if ((xn - x).norm() == 0.0) break;
      fn = eval(xn, nullptr);
      const double decrease = opt.armijo_c1 * g.dot(xn - x);
      if (std::isfinite(fn) && fn <= f + decrease && fn <= f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      r.reason = "line-search";
      break;
    }
    if (b.active && (xn - (x + step * d)).norm() > 0) ++r.projections;
    fn = eval(xn, &gn);
    const VectorXd s = xn - x;
    const VectorXd y = gn - g;
    x = xn;
    f = fn;
    g = gn;
    ++r.iterations;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const MatrixXd v = MatrixXd::Identity(n, n) - rho * y * s.transpose();
      h = v.transpose() * h * v + rho * s * s.transpose();
    }
  }
  r.x.assign(x.data(), x.data() + n);
  r.value = f;
  return r;
}

RefineReport bfgs_refine(const LensProblem& problem, const DesignPoint& input, BfgsOptions opt) {
  const auto& tmpl = problem.lens();
  RefineReport rep;
  rep.descriptor = describe(tmpl, input);
  rep.input = input;
  rep.input_value = problem.value(input);
  if (!std::isfinite(rep.input_value)) {
    throw ArgumentError("bfgs_refine: input design cannot be evaluated");
  }
  const std::size_t nc = tmpl.n_curvatures();
  std::vector<double> vars(input.continuous.begin(),
                           input.continuous.begin() + static_cast<long>(nc));
  vars.push_back(problem.solved_image_distance(input));
  opt.lower.assign(nc + 1, -INFINITY);
  opt.upper.assign(nc + 1, INFINITY);
  const double cmax = problem.space().max_curvature();
  const double margin = problem.space().sign_margin;
  for (std::size_t i = 0; i < nc; ++i) {
    const int s = rep.descriptor.signs[i];
    if (s > 0) {
      opt.lower[i] = std::min(margin, vars[i]);
      opt.upper[i] = std::max(cmax, vars[i]);
    } else if (s < 0) {
      opt.lower[i] = std::min(-cmax, vars[i]);
      opt.upper[i] = std::max(-margin, vars[i]);
    } else {
      opt.lower[i] = opt.upper[i] = 0.0;
    }
  }
  const auto fg = [&](std::span<const double> v, std::vector<double>* g) {
    if (g == nullptr) return problem.refine_value_and_gradient(input, v, nullptr);
    try {
      return problem.refine_value_and_gradient(input, v, g);
    } catch (const Error&) {
      g->assign(v.size(), NAN);
      return static_cast<double>(INFINITY);
    }
  };
  const auto r = bfgs_minimize(fg, vars, opt);
  rep.refined = input;
  std::copy(r.x.begin(), r.x.begin() + static_cast<long>(nc), rep.refined.continuous.begin());
  rep.refined_image_distance = r.x[nc];
  rep.refined_value = r.value;
  rep.iterations = r.iterations;
  rep.gradient_norm = r.gradient_norm;
  rep.reason = r.reason;
  rep.projections = r.projections;
  rep.improvement = rep.refined_value > 0 ? rep.input_value / rep.refined_value : INFINITY;
  return rep;
}

}  // namespace ldgea
