// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldgea/archive_io.hpp"

namespace ldgea {

struct ArchiveStats {
  std::string label;  // file path as given
  std::string algorithm;
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t candidates = 0;
  std::size_t distinct = 0;
  double best = INFINITY;
  double worst = INFINITY;
  double p10 = INFINITY, p50 = INFINITY, p90 = INFINITY;
  long evaluations = 0;
  bool complete = false;
  std::string termination;
};

ArchiveStats archive_stats(const LoadedArchive& a);

/// Nearest-rank percentile of `sorted` (ascending); inf when empty.
double percentile(const std::vector<double>& sorted, double q);

struct Report {
  nlohmann::json summary;
  std::string iterations_csv;       // per archive and iteration
  std::string iterations_mean_csv;  // per algorithm and iteration, averaged over archives
};

/// Pure function of the inputs; identical archives give identical bytes.
Report build_report(const std::vector<LoadedArchive>& archives);

/// Writes report.json, iterations.csv and iterations_mean.csv into `dir`.
void write_report(const Report& r, const std::filesystem::path& dir);

}  // namespace ldgea
