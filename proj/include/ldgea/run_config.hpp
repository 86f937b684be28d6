// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldgea/evostrat.hpp"
#include "ldgea/hvea.hpp"
#include "ldgea/ldgea.hpp"
#include "ldgea/merit.hpp"

namespace ldgea {

/// Everything a batch run needs. Loaded from a JSON file whose `preset` and
/// `catalog` paths are relative to the file itself.
struct RunConfig {
  std::filesystem::path source;  // the config file, if any
  std::filesystem::path preset;
  std::filesystem::path catalog;
  LdgeaSettings ldgea;
  long budget = 100000;  // per-descriptor HV-EA budget
  HveaConfig hvea;       // budget, window, seed and stop are filled per run
  MeritConfig merit;
  bool merit_target_from_preset = true;
  SearchSpaceConfig space;
  CmaParams baseline;
  int refine_top_k = 5;
  double max_wall_seconds = 0.0;  // 0: unlimited

  /// lambda * B * I, the equal-budget rule for the baseline.
  long baseline_budget() const {
    return static_cast<long>(ldgea.lambda) * budget * ldgea.iterations;
  }

  nlohmann::json to_json() const;
  /// Throws ConfigError on unknown keys or invalid values.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  void validate() const;
};

/// Applies `key=value` overrides (dotted paths, value parsed as JSON when
/// possible, otherwise taken as a string).
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides);

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

}  // namespace ldgea
