// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldgea/types.hpp"

namespace ldgea {

using Objective = std::function<double(std::span<const double>)>;

enum class Termination {
  kBudget,
  kParamTol,
  kFunTol,
  kHistTol,
  kExternalStop,
  kMaxIterations,
  kDegenerate,
};

const char* to_string(Termination t);

struct EsConfig {
  int lambda = 0;       // 0: 4 + floor(3 ln n)
  int mu = 0;           // 0: max(1, floor(lambda / 4))
  double sigma0 = 0.3;  // fraction of the box width per coordinate
  Box box;
  long budget = 0;
  double tol_param = 1e-10;
  double tol_fun = 1e-10;
  double tol_hist = 1e-5;
  int history = 0;  // 0: 10 + ceil(30 n / lambda)
  std::uint64_t seed = 0;
  const std::atomic<bool>* stop = nullptr;

  int resolved_lambda() const;
  int resolved_mu() const;
  int resolved_history() const;
  /// Throws ArgumentError on an inconsistent configuration.
  void validate() const;
};

struct EsRunResult {
  std::vector<double> best;
  double best_value = INFINITY;
  long evaluations = 0;
  int generations = 0;
  Termination reason = Termination::kBudget;
  std::vector<double> trace;  // best value of each generation
};

/// CMSA-ES inside `cfg.box` with mirror-reflection repair. Only whole
/// generations are run. `init_value`, when given, is taken as f(init) and
/// saves one evaluation.
EsRunResult cmsa_es_run(const Objective& f, const EsConfig& cfg, std::span<const double> init,
                        std::optional<double> init_value = std::nullopt);

// ---------------------------------------------------------------------------
// Mixed-integer CMA-ES baseline

/// Nearest material index, clamped to [0, catalog_size - 1].
int round_integer_coordinate(double v, int catalog_size);

/// Minimum per-coordinate standard deviation for integer coordinates: a
/// sample centred on an integer leaves its rounding cell with probability p.
double integer_min_std(double p);

struct MixedSpace {
  Box box;                       // integer coordinates span [0, catalog_size - 1]
  std::vector<bool> integer_mask;
  int catalog_size = 1;

  std::size_t size() const { return box.size(); }
  /// Applies reflection to continuous and rounding to integer coordinates.
  std::vector<double> evaluation_point(std::span<const double> x) const;
};

struct CmaParams {
  int lambda = 0;  // 0: default
  double sigma0 = 0.3;
  double tol_param = 1e-10;
  double tol_fun = 1e-10;
  long max_iterations = 0;  // 0: 100 + 50 (n + 3)^2 / sqrt(lambda)
  double integer_flip_probability = 0.0;  // 0: 1 / n
};

/// One (mu_w, lambda)-CMA-ES instance in box-normalised coordinates.
class CmaEs {
 public:
  CmaEs(const MixedSpace& space, const CmaParams& params, std::span<const double> mean,
        std::uint64_t seed);
  ~CmaEs();
  CmaEs(CmaEs&&) noexcept;
  CmaEs& operator=(CmaEs&&) noexcept;

  int lambda() const;
  /// Samples a generation; returns the (repaired, unrounded) points.
  const std::vector<std::vector<double>>& ask();
  /// Ranks the last `ask()` by `values` and updates the state. Values of
  /// unevaluated offspring (partial generation) should be +inf.
  void tell(std::span<const double> values);
  /// Stop reason if a per-run criterion fired after the last tell.
  std::optional<Termination> stop_reason() const;
  std::vector<double> mean() const;
  /// sigma * sqrt(C_ii) in the original coordinate units.
  std::vector<double> coordinate_std() const;
  long generation() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

struct ConvergedPoint {
  std::vector<double> x;  // evaluation point (integers rounded)
  double value = INFINITY;
  int run = 0;
  int lambda = 0;
  long evaluations = 0;  // used by this run
  Termination reason = Termination::kBudget;
};

struct BaselineResult {
  std::vector<ConvergedPoint> archive;
  long evaluations = 0;
  int restarts = 0;
  bool interrupted = false;
};

struct BaselineConfig {
  CmaParams cma;
  long budget = 0;
  std::uint64_t seed = 0;
  const std::atomic<bool>* stop = nullptr;
  /// Called once per finished run, in order.
  std::function<void(const ConvergedPoint&)> on_converged;
};

/// Restarted CMA-ES under a shared budget (BIPOP regime alternation). The
/// evaluation count equals the budget exactly unless interrupted.
BaselineResult cma_es_baseline_run(const Objective& f, const MixedSpace& space,
                                   const BaselineConfig& cfg);

}  // namespace ldgea
