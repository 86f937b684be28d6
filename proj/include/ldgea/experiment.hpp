// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldgea/lens_problem.hpp"
#include "ldgea/refine.hpp"
#include "ldgea/run_config.hpp"

namespace ldgea {

using LogFn = std::function<void(const std::string&)>;

/// Loaded inputs of a run. Construction fails with ConfigError before any
/// file is written.
struct Workspace {
  RunConfig config;
  std::shared_ptr<const GlassCatalog> catalog;
  std::shared_ptr<const LensProblem> problem;

  static Workspace open(const RunConfig& cfg);
  HveaConfig hvea_config() const;
};

struct RunSummary {
  std::string algorithm;
  std::string run_id;
  long budget = 0;
  long evaluations = 0;
  std::size_t candidates = 0;
  std::size_t distinct = 0;
  double best_value = INFINITY;
  std::string best_descriptor;
  int iterations = 0;
  std::string termination;
  bool interrupted = false;
  double wall_seconds = 0.0;
  std::filesystem::path archive;

  nlohmann::json to_json() const;
};

/// Writes archive.jsonl, generations.jsonl and summary.json into `out_dir`.
RunSummary run_ldgea_experiment(const Workspace& ws, const std::filesystem::path& out_dir,
                                const std::atomic<bool>* stop = nullptr, const LogFn& log = {});

/// Equal-budget CMA-ES baseline; writes archive.jsonl and summary.json.
RunSummary run_baseline_experiment(const Workspace& ws, const std::filesystem::path& out_dir,
                                   const std::atomic<bool>* stop = nullptr,
                                   const LogFn& log = {});

struct RefineSummary {
  std::vector<RefineReport> reports;
  std::vector<std::string> errors;  // one per failed candidate
  bool interrupted = false;
  std::filesystem::path output;
};

/// Refines the `top_k` best archived candidates (the run's configured count
/// when `top_k` < 1) and writes one JSON line per candidate to `out_path`.
RefineSummary run_refine(const std::filesystem::path& archive, int top_k, int threads,
                         const std::filesystem::path& out_path,
                         const std::atomic<bool>* stop = nullptr, const LogFn& log = {});

/// Workspace described by an archive header (absolute input paths).
Workspace workspace_from_archive(const nlohmann::json& header);

/// Renders the candidate at 1-based `rank` (ordered by value). Throws
/// ArgumentError when the rank is out of range.
std::string render_archive_rank(const std::filesystem::path& archive, int rank);

}  // namespace ldgea
