// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end over the ldgea C interface.
//
//   ldgea run CONFIG [--set key=value]... [--ablated] [--out DIR]
//   ldgea baseline CONFIG [--set key=value]... [--out DIR]
//   ldgea refine ARCHIVE [--top-k K] [--out FILE]
//   ldgea report ARCHIVE... [--out DIR]
//   ldgea render ARCHIVE [--rank R] [--out FILE]
//
// Exit status: 0 success, 2 configuration or argument error, 3 runtime
// failure or interruption. LDGEA_THREADS overrides the configured thread cap.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldgea/ldgea.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

bool g_quiet = false;

int exit_code(ldg_status s) {
  switch (s) {
    case LDG_OK: return kExitOk;
    case LDG_E_CONFIG:
    case LDG_E_ARGUMENT: return kExitConfig;
    default: return kExitRuntime;
  }
}

int fail(ldg_status s) {
  std::fprintf(stderr, "ldgea: %s: %s\n", ldg_status_name(s), ldg_last_error());
  return exit_code(s);
}

void on_signal(int) { ldg_request_stop(); }

void log_line(const char* line, void*) {
  if (!g_quiet) std::fprintf(stderr, "%s\n", line);
}

/// -1 when unset, -2 when malformed, otherwise the parsed cap.
int env_threads() {
  const char* v = std::getenv("LDGEA_THREADS");
  if (v == nullptr || *v == '\0') return -1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0 || n > 4096) {
    std::fprintf(stderr, "ldgea: malformed LDGEA_THREADS='%s'\n", v);
    return -2;
  }
  return static_cast<int>(n);
}

int resolve_threads(int flag) {
  if (flag >= 0) return flag;
  return env_threads();
}

struct ConfigHandle {
  ldg_config* ptr = nullptr;
  ~ConfigHandle() { ldg_config_free(ptr); }
};

ldg_status load_config(const std::string& path, const std::vector<std::string>& sets, int threads,
                       ConfigHandle& out) {
  std::vector<const char*> raw;
  for (const auto& s : sets) raw.push_back(s.c_str());
  ldg_status st = ldg_config_load(path.c_str(), raw.data(), raw.size(), &out.ptr);
  if (st == LDG_OK && threads >= 0) st = ldg_config_set_threads(out.ptr, threads);
  return st;
}

void print_summary(const ldg_run_summary& s) {
  std::printf("run_id        %s\n", s.run_id);
  std::printf("budget        %lld\n", static_cast<long long>(s.budget));
  std::printf("evaluations   %lld\n", static_cast<long long>(s.evaluations));
  std::printf("candidates    %lld\n", static_cast<long long>(s.candidates));
  std::printf("descriptors   %lld\n", static_cast<long long>(s.distinct_descriptors));
  std::printf("best F        %.9g\n", s.best_value);
  std::printf("iterations    %d\n", s.iterations);
  std::printf("termination   %s\n", s.termination);
  std::printf("wall seconds  %.3f\n", s.wall_seconds);
}

std::string default_out(const std::string& config, const char* suffix) {
  return (std::filesystem::path("runs") /
          (std::filesystem::path(config).stem().string() + suffix))
      .string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Descriptor-guided multimodal lens design optimiser"};
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress output");

  std::string config, out, archive;
  std::vector<std::string> sets, archives;
  bool ablated = false;
  int threads = -1, top_k = 0, rank = 1;

  auto* run = app.add_subcommand("run", "Run the descriptor-guided optimiser");
  run->add_option("config", config, "Run configuration (JSON)")->required();
  run->add_option("--set", sets, "Override a configuration key, e.g. ldgea.lambda=8");
  run->add_flag("--ablated", ablated, "Sample descriptors uniformly (control variant)");
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Thread cap (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* base = app.add_subcommand("baseline", "Run the equal-budget CMA-ES baseline");
  base->add_option("config", config, "Run configuration (JSON)")->required();
  base->add_option("--set", sets, "Override a configuration key");
  base->add_option("--out", out, "Output directory");

  auto* refine = app.add_subcommand("refine", "Gradient-refine the best archived designs");
  refine->add_option("archive", archive, "Archive file (archive.jsonl)")->required();
  refine->add_option("--top-k", top_k, "Number of candidates (default: from the run config)");
  refine->add_option("--out", out, "Output file (default: refine.jsonl next to the archive)");
  refine->add_option("--threads", threads, "Thread cap (0: all cores)")->check(CLI::NonNegativeNumber);

  auto* report = app.add_subcommand("report", "Summarise and compare archives");
  report->add_option("archives", archives, "Archive files")->required();
  report->add_option("--out", out, "Output directory")->required();

  auto* render = app.add_subcommand("render", "Draw an archived design as SVG");
  render->add_option("archive", archive, "Archive file")->required();
  render->add_option("--rank", rank, "1-based rank by objective value");
  render->add_option("--out", out, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (threads < 0 && env_threads() == -2) return kExitConfig;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  ldg_set_log(log_line, nullptr);

  if (run->parsed() || base->parsed()) {
    ConfigHandle cfg;
    ldg_status st = load_config(config, sets, resolve_threads(threads), cfg);
    if (st != LDG_OK) return fail(st);
    ldg_run_summary summary{};
    if (run->parsed()) {
      if (ablated) ldg_config_set_ablated(cfg.ptr, 1);
      if (out.empty()) out = default_out(config, ablated ? "-ablated" : "");
      st = ldg_run(cfg.ptr, out.c_str(), &summary);
    } else {
      if (out.empty()) out = default_out(config, "-baseline");
      st = ldg_baseline(cfg.ptr, out.c_str(), &summary);
    }
    if (st == LDG_OK || st == LDG_E_INTERRUPTED) {
      print_summary(summary);
      std::printf("output        %s\n", out.c_str());
    }
    return st == LDG_OK ? kExitOk : fail(st);
  }
  if (refine->parsed()) {
    if (out.empty()) out = (std::filesystem::path(archive).parent_path() / "refine.jsonl").string();
    ldg_refine_summary summary{};
    const ldg_status st =
        ldg_refine(archive.c_str(), top_k, std::max(0, resolve_threads(threads)), out.c_str(), &summary);
    if (st == LDG_OK || st == LDG_E_INTERRUPTED) {
      std::printf("refined       %d\nfailed        %d\n", summary.refined, summary.failed);
      if (summary.refined > 0) {
        std::printf("improvement   x%.6g .. x%.6g\n", summary.min_improvement, summary.max_improvement);
      }
      std::printf("output        %s\n", out.c_str());
    }
    return st == LDG_OK ? kExitOk : fail(st);
  }
  if (report->parsed()) {
    std::vector<const char*> raw;
    for (const auto& a : archives) raw.push_back(a.c_str());
    const ldg_status st = ldg_report(raw.data(), raw.size(), out.c_str());
    if (st != LDG_OK) return fail(st);
    std::printf("report        %s\n", out.c_str());
    return kExitOk;
  }
  if (render->parsed()) {
    const ldg_status st = ldg_render(archive.c_str(), rank, out.c_str());
    if (st != LDG_OK) return fail(st);
    std::printf("svg           %s\n", out.c_str());
    return kExitOk;
  }
  return kExitConfig;
}
