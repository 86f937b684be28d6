// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/ldgea.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "ldgea/archive_io.hpp"
#include "ldgea/error.hpp"
#include "ldgea/experiment.hpp"
#include "ldgea/report.hpp"

struct ldg_config {
  ldgea::RunConfig config;
  std::string json;
};

struct ldg_archive {
  ldgea::LoadedArchive archive;
  ldgea::ArchiveStats stats;
};

namespace {

thread_local std::string g_error;
std::atomic<bool> g_stop{false};
std::mutex g_log_mutex;
ldg_log_fn g_log = nullptr;
void* g_log_user = nullptr;

ldgea::LogFn logger() {
  return [](const std::string& line) {
    std::lock_guard lock(g_log_mutex);
    if (g_log != nullptr) g_log(line.c_str(), g_log_user);
  };
}

template <typename Fn>
ldg_status guarded(Fn&& fn) {
  g_error.clear();
  try {
    return fn();
  } catch (const ldgea::ConfigError& e) {
    g_error = e.what();
    return LDG_E_CONFIG;
  } catch (const ldgea::ArgumentError& e) {
    g_error = e.what();
    return LDG_E_ARGUMENT;
  } catch (const std::exception& e) {
    g_error = e.what();
    return LDG_E_RUNTIME;
  } catch (...) {
    g_error = "unknown error";
    return LDG_E_RUNTIME;
  }
}

ldg_status null_argument(const char* what) {
  g_error = std::string(what) + " must not be NULL";
  return LDG_E_ARGUMENT;
}

void copy_text(char* dst, std::size_t cap, const std::string& src) {
  std::strncpy(dst, src.c_str(), cap - 1);
  dst[cap - 1] = '\0';
}

void fill(ldg_run_summary* out, const ldgea::RunSummary& s) {
  if (out == nullptr) return;
  out->budget = s.budget;
  out->evaluations = s.evaluations;
  out->candidates = static_cast<int64_t>(s.candidates);
  out->distinct_descriptors = static_cast<int64_t>(s.distinct);
  out->best_value = s.best_value;
  out->wall_seconds = s.wall_seconds;
  out->iterations = s.iterations;
  copy_text(out->termination, sizeof out->termination, s.termination);
  copy_text(out->run_id, sizeof out->run_id, s.run_id);
}

}  // namespace

extern "C" {

const char* ldg_version(void) { return "1.0.0"; }

const char* ldg_last_error(void) { return g_error.c_str(); }

const char* ldg_status_name(ldg_status status) {
  switch (status) {
    case LDG_OK: return "ok";
    case LDG_E_ARGUMENT: return "argument error";
    case LDG_E_CONFIG: return "configuration error";
    case LDG_E_RUNTIME: return "runtime error";
    case LDG_E_INTERRUPTED: return "interrupted";
  }
  return "unknown";
}

void ldg_set_log(ldg_log_fn fn, void* user) {
  std::lock_guard lock(g_log_mutex);
  g_log = fn;
  g_log_user = user;
}

void ldg_request_stop(void) { g_stop.store(true); }
void ldg_clear_stop(void) { g_stop.store(false); }

ldg_status ldg_config_load(const char* path, const char* const* overrides, size_t n_overrides,
                           ldg_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  if (n_overrides > 0 && overrides == nullptr) return null_argument("overrides");
  return guarded([&] {
    std::vector<std::string> ov(overrides, overrides + n_overrides);
    auto cfg = std::make_unique<ldg_config>();
    cfg->config = ldgea::load_run_config(path, ov);
    cfg->json = cfg->config.to_json().dump(2);
    *out = cfg.release();
    return LDG_OK;
  });
}

void ldg_config_free(ldg_config* config) { delete config; }

ldg_status ldg_config_set_threads(ldg_config* config, int threads) {
  if (config == nullptr) return null_argument("config");
  if (threads < 0) {
    g_error = "thread cap must be non-negative";
    return LDG_E_ARGUMENT;
  }
  config->config.ldgea.threads = threads;
  config->json = config->config.to_json().dump(2);
  return LDG_OK;
}

ldg_status ldg_config_set_ablated(ldg_config* config, int ablated) {
  if (config == nullptr) return null_argument("config");
  config->config.ldgea.ablated = ablated != 0;
  config->json = config->config.to_json().dump(2);
  return LDG_OK;
}

ldg_status ldg_config_baseline_budget(const ldg_config* config, int64_t* out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  *out = config->config.baseline_budget();
  return LDG_OK;
}

const char* ldg_config_json(const ldg_config* config) {
  return config == nullptr ? "" : config->json.c_str();
}

ldg_status ldg_run(const ldg_config* config, const char* out_dir, ldg_run_summary* summary) {
  if (config == nullptr) return null_argument("config");
  if (out_dir == nullptr) return null_argument("out_dir");
  return guarded([&] {
    const auto ws = ldgea::Workspace::open(config->config);
    const auto s = ldgea::run_ldgea_experiment(ws, out_dir, &g_stop, logger());
    fill(summary, s);
    return s.interrupted ? LDG_E_INTERRUPTED : LDG_OK;
  });
}

ldg_status ldg_baseline(const ldg_config* config, const char* out_dir, ldg_run_summary* summary) {
  if (config == nullptr) return null_argument("config");
  if (out_dir == nullptr) return null_argument("out_dir");
  return guarded([&] {
    const auto ws = ldgea::Workspace::open(config->config);
    const auto s = ldgea::run_baseline_experiment(ws, out_dir, &g_stop, logger());
    fill(summary, s);
    return s.interrupted ? LDG_E_INTERRUPTED : LDG_OK;
  });
}

ldg_status ldg_refine(const char* archive_path, int top_k, int threads, const char* out_path,
                      ldg_refine_summary* summary) {
  if (archive_path == nullptr) return null_argument("archive_path");
  if (out_path == nullptr) return null_argument("out_path");
  return guarded([&] {
    const auto r = ldgea::run_refine(archive_path, top_k, threads, out_path, &g_stop, logger());
    if (summary != nullptr) {
      summary->refined = static_cast<int32_t>(r.reports.size());
      summary->failed = static_cast<int32_t>(r.errors.size());
      summary->min_improvement = INFINITY;
      summary->max_improvement = -INFINITY;
      for (const auto& rep : r.reports) {
        summary->min_improvement = std::min(summary->min_improvement, rep.improvement);
        summary->max_improvement = std::max(summary->max_improvement, rep.improvement);
      }
    }
    return r.interrupted ? LDG_E_INTERRUPTED : LDG_OK;
  });
}

ldg_status ldg_report(const char* const* archive_paths, size_t n_archives, const char* out_dir) {
  if (archive_paths == nullptr || n_archives == 0) return null_argument("archive_paths");
  if (out_dir == nullptr) return null_argument("out_dir");
  return guarded([&] {
    std::vector<ldgea::LoadedArchive> archives;
    for (size_t i = 0; i < n_archives; ++i) {
      if (archive_paths[i] == nullptr) throw ldgea::ArgumentError("archive path is NULL");
      archives.push_back(ldgea::load_archive(archive_paths[i]));
    }
    ldgea::write_report(ldgea::build_report(archives), out_dir);
    return LDG_OK;
  });
}

ldg_status ldg_render(const char* archive_path, int rank, const char* svg_path) {
  if (archive_path == nullptr) return null_argument("archive_path");
  if (svg_path == nullptr) return null_argument("svg_path");
  return guarded([&] {
    const std::string svg = ldgea::render_archive_rank(archive_path, rank);
    std::ofstream out(svg_path, std::ios::trunc);
    out << svg;
    if (!out) throw ldgea::Error(std::string("cannot write '") + svg_path + "'");
    return LDG_OK;
  });
}

ldg_status ldg_archive_load(const char* path, ldg_archive** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto a = std::make_unique<ldg_archive>();
    a->archive = ldgea::load_archive(path);
    a->stats = ldgea::archive_stats(a->archive);
    *out = a.release();
    return LDG_OK;
  });
}

void ldg_archive_free(ldg_archive* archive) { delete archive; }

int64_t ldg_archive_candidates(const ldg_archive* archive) {
  return archive == nullptr ? -1 : static_cast<int64_t>(archive->stats.candidates);
}

int64_t ldg_archive_distinct(const ldg_archive* archive) {
  return archive == nullptr ? -1 : static_cast<int64_t>(archive->stats.distinct);
}

double ldg_archive_best(const ldg_archive* archive) {
  return archive == nullptr ? NAN : archive->stats.best;
}

}  // extern "C"
