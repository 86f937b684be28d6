// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ldgea/error.hpp"

namespace ldgea {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!known.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json section(const json& j, const char* key) {
  return j.contains(key) ? j.at(key) : json::object();
}

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["preset"] = std::filesystem::absolute(preset).lexically_normal().string();
  j["catalog"] = std::filesystem::absolute(catalog).lexically_normal().string();
  j["seed"] = ldgea.seed;
  j["threads"] = ldgea.threads;
  j["budget"] = budget;
  j["refine_top_k"] = refine_top_k;
  j["max_wall_seconds"] = max_wall_seconds;
  j["ldgea"] = {{"lambda", ldgea.lambda},
                {"mu", ldgea.mu},
                {"alpha", ldgea.alpha},
                {"iterations", ldgea.iterations},
                {"stagnation_window", ldgea.stagnation_window},
                {"stagnation_tol", ldgea.stagnation_tol},
                {"kl_threshold", ldgea.kl_threshold},
                {"floor", ldgea.floor},
                {"sample_retries", ldgea.sample_retries},
                {"window", ldgea.window},
                {"ablated", ldgea.ablated}};
  j["hvea"] = {{"niche_cap", hvea.niche_cap},
               {"max_tests", hvea.max_tests},
               {"explore_patience", hvea.explore_patience}};
  j["es"] = {{"lambda", hvea.es.lambda},
             {"mu", hvea.es.mu},
             {"sigma0", hvea.es.sigma0},
             {"tol_param", hvea.es.tol_param},
             {"tol_fun", hvea.es.tol_fun},
             {"tol_hist", hvea.es.tol_hist},
             {"history", hvea.es.history}};
  j["merit"] = {{"weights", merit.weights},
                {"target_efl", merit.target_efl},
                {"min_glass_thickness", merit.min_glass_thickness},
                {"min_air_gap", merit.min_air_gap},
                {"min_working_distance", merit.min_working_distance},
                {"vignetting_magnitude", merit.vignetting_magnitude},
                {"efl_dead_zone", merit.efl_dead_zone},
                {"negative_path_scale", merit.negative_path_scale},
                {"quality_threshold", merit.quality_threshold},
                {"pupil_rings", merit.pupil_rings}};
  j["space"] = {{"min_radius_mm", space.min_radius_mm},
                {"sign_margin", space.sign_margin},
                {"positive_first_curvature", space.positive_first_curvature}};
  j["baseline"] = {{"lambda", baseline.lambda},
                   {"sigma0", baseline.sigma0},
                   {"tol_param", baseline.tol_param},
                   {"tol_fun", baseline.tol_fun},
                   {"max_iterations", baseline.max_iterations},
                   {"integer_flip_probability", baseline.integer_flip_probability}};
  return j;
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j,
                 {"preset", "catalog", "seed", "threads", "budget", "refine_top_k",
                  "max_wall_seconds", "ldgea", "hvea", "es", "merit", "space", "baseline"},
                 "config");
  RunConfig c;
  std::string preset, catalog;
  read(j, "preset", preset, "config");
  read(j, "catalog", catalog, "config");
  if (preset.empty()) throw ConfigError("config: missing 'preset'");
  if (catalog.empty()) throw ConfigError("config: missing 'catalog'");
  c.preset = std::filesystem::path(preset).is_absolute() ? std::filesystem::path(preset)
                                                         : base_dir / preset;
  c.catalog = std::filesystem::path(catalog).is_absolute() ? std::filesystem::path(catalog)
                                                           : base_dir / catalog;
  read(j, "seed", c.ldgea.seed, "config");
  read(j, "threads", c.ldgea.threads, "config");
  read(j, "budget", c.budget, "config");
  read(j, "refine_top_k", c.refine_top_k, "config");
  read(j, "max_wall_seconds", c.max_wall_seconds, "config");

  const json l = section(j, "ldgea");
  reject_unknown(l,
                 {"lambda", "mu", "alpha", "iterations", "stagnation_window", "stagnation_tol",
                  "kl_threshold", "floor", "sample_retries", "window", "ablated"},
                 "ldgea");
  read(l, "lambda", c.ldgea.lambda, "ldgea");
  read(l, "mu", c.ldgea.mu, "ldgea");
  read(l, "alpha", c.ldgea.alpha, "ldgea");
  read(l, "iterations", c.ldgea.iterations, "ldgea");
  read(l, "stagnation_window", c.ldgea.stagnation_window, "ldgea");
  read(l, "stagnation_tol", c.ldgea.stagnation_tol, "ldgea");
  read(l, "kl_threshold", c.ldgea.kl_threshold, "ldgea");
  read(l, "floor", c.ldgea.floor, "ldgea");
  read(l, "sample_retries", c.ldgea.sample_retries, "ldgea");
  read(l, "window", c.ldgea.window, "ldgea");
  read(l, "ablated", c.ldgea.ablated, "ldgea");

  const json h = section(j, "hvea");
  reject_unknown(h, {"niche_cap", "max_tests", "explore_patience"}, "hvea");
  read(h, "niche_cap", c.hvea.niche_cap, "hvea");
  read(h, "max_tests", c.hvea.max_tests, "hvea");
  read(h, "explore_patience", c.hvea.explore_patience, "hvea");

  const json e = section(j, "es");
  reject_unknown(e, {"lambda", "mu", "sigma0", "tol_param", "tol_fun", "tol_hist", "history"},
                 "es");
  read(e, "lambda", c.hvea.es.lambda, "es");
  read(e, "mu", c.hvea.es.mu, "es");
  read(e, "sigma0", c.hvea.es.sigma0, "es");
  read(e, "tol_param", c.hvea.es.tol_param, "es");
  read(e, "tol_fun", c.hvea.es.tol_fun, "es");
  read(e, "tol_hist", c.hvea.es.tol_hist, "es");
  read(e, "history", c.hvea.es.history, "es");

  const json m = section(j, "merit");
  reject_unknown(m,
                 {"weights", "target_efl", "min_glass_thickness", "min_air_gap",
                  "min_working_distance", "vignetting_magnitude", "efl_dead_zone",
                  "negative_path_scale", "quality_threshold", "pupil_rings"},
                 "merit");
  read(m, "weights", c.merit.weights, "merit");
  if (m.contains("target_efl")) {
    read(m, "target_efl", c.merit.target_efl, "merit");
    c.merit_target_from_preset = false;
  }
  read(m, "min_glass_thickness", c.merit.min_glass_thickness, "merit");
  read(m, "min_air_gap", c.merit.min_air_gap, "merit");
  read(m, "min_working_distance", c.merit.min_working_distance, "merit");
  read(m, "vignetting_magnitude", c.merit.vignetting_magnitude, "merit");
  read(m, "efl_dead_zone", c.merit.efl_dead_zone, "merit");
  read(m, "negative_path_scale", c.merit.negative_path_scale, "merit");
  read(m, "quality_threshold", c.merit.quality_threshold, "merit");
  read(m, "pupil_rings", c.merit.pupil_rings, "merit");

  const json s = section(j, "space");
  reject_unknown(s, {"min_radius_mm", "sign_margin", "positive_first_curvature"}, "space");
  read(s, "min_radius_mm", c.space.min_radius_mm, "space");
  read(s, "sign_margin", c.space.sign_margin, "space");
  read(s, "positive_first_curvature", c.space.positive_first_curvature, "space");

  const json b = section(j, "baseline");
  reject_unknown(b,
                 {"lambda", "sigma0", "tol_param", "tol_fun", "max_iterations",
                  "integer_flip_probability"},
                 "baseline");
  read(b, "lambda", c.baseline.lambda, "baseline");
  read(b, "sigma0", c.baseline.sigma0, "baseline");
  read(b, "tol_param", c.baseline.tol_param, "baseline");
  read(b, "tol_fun", c.baseline.tol_fun, "baseline");
  read(b, "max_iterations", c.baseline.max_iterations, "baseline");
  read(b, "integer_flip_probability", c.baseline.integer_flip_probability, "baseline");

  c.validate();
  return c;
}

void RunConfig::validate() const {
  try {
    ldgea.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("ldgea: ") + e.what());
  }
  if (budget < 1) throw ConfigError("budget must be positive");
  if (refine_top_k < 0) throw ConfigError("refine_top_k must be non-negative");
  if (!(max_wall_seconds >= 0.0)) throw ConfigError("max_wall_seconds must be non-negative");
  if (hvea.niche_cap < 1 || hvea.max_tests < 1 || hvea.explore_patience < 0) {
    throw ConfigError("hvea: niche_cap and max_tests must be positive");
  }
  if (hvea.es.lambda < 0 || hvea.es.mu < 0 || hvea.es.history < 0) {
    throw ConfigError("es: sizes must be non-negative");
  }
  if (hvea.es.mu > 0 && hvea.es.lambda > 0 && hvea.es.mu > hvea.es.lambda) {
    throw ConfigError("es: mu must not exceed lambda");
  }
  if (!(hvea.es.sigma0 > 0) || !(hvea.es.tol_param > 0) || !(hvea.es.tol_fun > 0) ||
      !(hvea.es.tol_hist > 0)) {
    throw ConfigError("es: sigma0 and tolerances must be positive");
  }
  for (double w : merit.weights) {
    if (!(w >= 0.0)) throw ConfigError("merit: weights must be non-negative");
  }
  if (!(merit.target_efl > 0) || merit.pupil_rings < 1 || !(merit.negative_path_scale > 0)) {
    throw ConfigError("merit: target_efl, pupil_rings and negative_path_scale must be positive");
  }
  if (!(space.min_radius_mm > 0) || !(space.sign_margin > 0) ||
      !(space.sign_margin < space.max_curvature())) {
    throw ConfigError("space: need 0 < sign_margin < 1 / min_radius_mm");
  }
  if (!(baseline.sigma0 > 0) || baseline.lambda < 0 || baseline.lambda == 1) {
    throw ConfigError("baseline: sigma0 must be positive and lambda 0 or at least 2");
  }
  if (!(baseline.integer_flip_probability >= 0 && baseline.integer_flip_probability < 1)) {
    throw ConfigError("baseline: integer_flip_probability must lie in [0, 1)");
  }
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + o + "': expected key=value");
    }
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) throw ConfigError("override '" + o + "': empty key segment");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        break;
      }
      json& child = (*node)[part];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) throw ConfigError("override '" + o + "': '" + part + "' is not a section");
      node = &child;
      start = dot + 1;
    }
  }
}

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  apply_overrides(j, overrides);
  auto c = RunConfig::from_json(j, std::filesystem::absolute(path).parent_path());
  c.source = std::filesystem::absolute(path);
  return c;
}

}  // namespace ldgea
