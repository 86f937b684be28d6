// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "ldgea/archive_io.hpp"
#include "ldgea/error.hpp"
#include "ldgea/render.hpp"

namespace ldgea {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

/// Combines an external stop flag and a wall-clock limit into one flag.
class StopGuard {
 public:
  StopGuard(const std::atomic<bool>* external, double max_seconds) {
    if (external == nullptr && !(max_seconds > 0)) return;
    const auto start = Clock::now();
    watcher_ = std::jthread([this, external, max_seconds, start](std::stop_token token) {
      while (!token.stop_requested()) {
        const bool ext = external != nullptr && external->load();
        const bool late =
            max_seconds > 0 &&
            std::chrono::duration<double>(Clock::now() - start).count() > max_seconds;
        if (ext || late) {
          halt_ = true;
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    });
  }
  const std::atomic<bool>* flag() const { return &halt_; }
  bool triggered() const { return halt_.load(); }

 private:
  std::atomic<bool> halt_{false};
  std::jthread watcher_;
};

void say(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

std::string fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json candidate_json(const LensProblem& p, int iteration, int slot, const Descriptor& d,
                    const DesignPoint& point, double value) {
  json r = {{"type", "candidate"},
            {"iteration", iteration},
            {"slot", slot},
            {"descriptor", d.to_string()},
            {"continuous", point.continuous},
            {"materials", point.materials},
            {"value", value}};
  try {
    r["breakdown"] = breakdown_json(p.breakdown(point));
  } catch (const Error&) {
    r["breakdown"] = nullptr;
  }
  r["timestamp"] = utc_timestamp();
  return r;
}

json header_json(const Workspace& ws, const std::string& algorithm, double window) {
  // The thread cap never changes results, so it stays out of the identity.
  json cfg = ws.config.to_json();
  cfg.erase("threads");
  json h = {{"type", "header"},
            {"format", "ldgea-archive"},
            {"version", 1},
            {"algorithm", algorithm},
            {"run_id", fnv1a_hex(algorithm + cfg.dump())},
            {"seed", ws.config.ldgea.seed},
            {"preset", cfg.at("preset")},
            {"catalog", cfg.at("catalog")},
            {"template", ws.problem->lens().name},
            {"window", window},
            {"config", cfg}};
  h["timestamp"] = utc_timestamp();
  return h;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void fill_archive_stats(RunSummary& s, const GlobalArchive& archive) {
  s.distinct = archive.size();
  s.candidates = 0;
  for (const auto& [d, a] : archive) {
    s.candidates += a.size();
    if (!a.empty() && a.best_value() < s.best_value) {
      s.best_value = a.best_value();
      s.best_descriptor = d.to_string();
    }
  }
}

}  // namespace

json RunSummary::to_json() const {
  return {{"algorithm", algorithm},
          {"run_id", run_id},
          {"budget", budget},
          {"evaluations", evaluations},
          {"candidates", candidates},
          {"distinct_descriptors", distinct},
          {"best_value", best_value},
          {"best_descriptor", best_descriptor},
          {"iterations", iterations},
          {"termination", termination},
          {"interrupted", interrupted},
          {"wall_seconds", wall_seconds},
          {"archive", archive.string()}};
}

Workspace Workspace::open(const RunConfig& cfg) {
  cfg.validate();
  Workspace ws;
  ws.config = cfg;
  auto catalog = std::make_shared<GlassCatalog>(GlassCatalog::load(cfg.catalog));
  if (catalog->size() == 0) throw ConfigError("glass catalog '" + cfg.catalog.string() + "' is empty");
  auto lens = load_preset(cfg.preset, *catalog);
  if (cfg.merit_target_from_preset) ws.config.merit.target_efl = lens.target_efl;
  ws.catalog = catalog;
  try {
    ws.problem = std::make_shared<LensProblem>(std::move(lens), catalog, ws.config.merit,
                                               ws.config.space);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  ws.config.merit_target_from_preset = false;
  return ws;
}

HveaConfig Workspace::hvea_config() const {
  HveaConfig h = config.hvea;
  h.budget = config.budget;
  h.window = config.ldgea.window;
  return h;
}

Workspace workspace_from_archive(const json& header) {
  if (!header.contains("config")) throw ConfigError("archive header has no config");
  return Workspace::open(RunConfig::from_json(header.at("config"), "/"));
}

RunSummary run_ldgea_experiment(const Workspace& ws, const std::filesystem::path& out_dir,
                                const std::atomic<bool>* stop, const LogFn& log) {
  const auto started = Clock::now();
  StopGuard guard(stop, ws.config.max_wall_seconds);
  LdgeaSettings settings = ws.config.ldgea;
  settings.stop = guard.flag();
  const LensProblem& problem = *ws.problem;

  RunSummary s;
  s.algorithm = settings.ablated ? "ldgea-ablated" : "ldgea";
  s.budget = static_cast<long>(settings.lambda) * ws.config.budget * settings.iterations;
  std::filesystem::create_directories(out_dir);
  const json header = header_json(ws, s.algorithm, settings.window);
  s.run_id = header.at("run_id");
  s.archive = out_dir / "archive.jsonl";
  ArchiveWriter archive(s.archive, header);
  std::ofstream gen_log(out_dir / "generations.jsonl", std::ios::trunc);
  if (!gen_log) throw Error("cannot create generation log in '" + out_dir.string() + "'");
  say(log, s.algorithm + " run " + s.run_id + ": lambda=" + std::to_string(settings.lambda) +
               " mu=" + std::to_string(settings.mu) + " I=" + std::to_string(settings.iterations) +
               " B=" + std::to_string(ws.config.budget));

  double best_so_far = INFINITY;
  const auto on_generation = [&](const GenerationRecord& rec,
                                 std::span<const DescriptorEvaluation> evals) {
    json errors = json::array();
    int niches = 0;
    for (std::size_t i = 0; i < evals.size(); ++i) {
      const auto& e = evals[i];
      niches += e.result.niche_count;
      if (!e.error.empty()) errors.push_back({{"slot", i}, {"error", e.error}});
      for (const auto& c : e.result.archive.entries()) {
        archive.write(candidate_json(problem, rec.iteration, static_cast<int>(i), e.descriptor,
                                     with_materials(c.x, e.descriptor), c.value));
        best_so_far = std::min(best_so_far, c.value);
      }
    }
    std::vector<std::string> names;
    for (const auto& d : rec.sampled) names.push_back(d.to_string());
    archive.write({{"type", "generation"},
                   {"iteration", rec.iteration},
                   {"descriptors", names},
                   {"f", rec.f},
                   {"seeds", rec.seeds},
                   {"selected", rec.selected},
                   {"kl", rec.kl},
                   {"evaluations", rec.evaluations},
                   {"evaluations_per_slot", rec.evaluations_per_slot},
                   {"merges", rec.merges},
                   {"distribution", distribution_json(rec.distribution)},
                   {"errors", errors}});
    archive.flush();
    gen_log << json{{"iteration", rec.iteration},
                    {"evaluations", rec.evaluations},
                    {"niches", niches},
                    {"merges", rec.merges},
                    {"kl", rec.kl},
                    {"best_so_far", best_so_far},
                    {"wall_seconds", rec.wall_seconds},
                    {"timestamp", utc_timestamp()}}
                   .dump()
            << '\n';
    gen_log.flush();
    say(log, "iteration " + std::to_string(rec.iteration) + ": evaluations " +
                 std::to_string(rec.evaluations) + ", best " + fixed(best_so_far) + ", KL " +
                 fixed(rec.kl) + ", " + fixed(rec.wall_seconds, 3) + " s");
  };

  const auto result = ldgea_run(problem.descriptor_space(), settings,
                                problem.descriptor_evaluator(ws.hvea_config()), on_generation);
  s.evaluations = result.evaluations;
  s.iterations = static_cast<int>(result.generations.size());
  s.termination = to_string(result.reason);
  s.interrupted = result.reason == StopReason::kInterrupted;
  fill_archive_stats(s, result.archive);
  archive.write({{"type", "end"},
                 {"termination", s.termination},
                 {"evaluations", s.evaluations},
                 {"candidates", s.candidates},
                 {"distinct_descriptors", s.distinct},
                 {"timestamp", utc_timestamp()}});
  archive.flush();
  s.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  write_json_file(out_dir / "summary.json", s.to_json());
  say(log, "done: " + std::to_string(s.candidates) + " candidates over " +
               std::to_string(s.distinct) + " descriptors, best " + fixed(s.best_value) + " (" +
               s.termination + ")");
  return s;
}

RunSummary run_baseline_experiment(const Workspace& ws, const std::filesystem::path& out_dir,
                                   const std::atomic<bool>* stop, const LogFn& log) {
  const auto started = Clock::now();
  StopGuard guard(stop, ws.config.max_wall_seconds);
  const LensProblem& problem = *ws.problem;
  const auto& cfg = ws.config;

  RunSummary s;
  s.algorithm = "cma-es-bipop";
  s.budget = cfg.baseline_budget();
  std::filesystem::create_directories(out_dir);
  json header = header_json(ws, s.algorithm, INFINITY);
  header["budget"] = s.budget;
  s.run_id = header.at("run_id");
  s.archive = out_dir / "archive.jsonl";
  ArchiveWriter archive(s.archive, header);
  say(log, "baseline budget " + std::to_string(s.budget) + " = " +
               std::to_string(cfg.ldgea.lambda) + " x " + std::to_string(cfg.budget) + " x " +
               std::to_string(cfg.ldgea.iterations));

  GlobalArchive global;
  BaselineConfig bc;
  bc.cma = cfg.baseline;
  bc.budget = s.budget;
  bc.seed = cfg.ldgea.seed;
  bc.stop = guard.flag();
  bc.on_converged = [&](const ConvergedPoint& cp) {
    const DesignPoint point = problem.baseline_point(cp.x);
    const Descriptor d = describe(problem.lens(), point);
    json r = candidate_json(problem, cp.run, 0, d, point, cp.value);
    r["lambda"] = cp.lambda;
    r["run_evaluations"] = cp.evaluations;
    r["reason"] = to_string(cp.reason);
    archive.write(r);
    archive.flush();
    auto [it, fresh] = global.try_emplace(d, d, INFINITY);
    archive_insert(it->second, d, Candidate{point.continuous, cp.value});
    say(log, "restart " + std::to_string(cp.run) + " (lambda " + std::to_string(cp.lambda) +
                 "): " + d.to_string() + " f=" + fixed(cp.value) + " after " +
                 std::to_string(cp.evaluations) + " evaluations, " + to_string(cp.reason));
  };
  const auto result = cma_es_baseline_run(problem.baseline_objective(), problem.baseline_space(), bc);
  s.evaluations = result.evaluations;
  s.iterations = static_cast<int>(result.archive.size());
  s.interrupted = result.interrupted;
  s.termination = s.interrupted ? "interrupted" : "budget";
  fill_archive_stats(s, global);
  archive.write({{"type", "end"},
                 {"termination", s.termination},
                 {"evaluations", s.evaluations},
                 {"candidates", s.candidates},
                 {"distinct_descriptors", s.distinct},
                 {"timestamp", utc_timestamp()}});
  archive.flush();
  s.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  write_json_file(out_dir / "summary.json", s.to_json());
  say(log, "done: " + std::to_string(s.candidates) + " converged points over " +
               std::to_string(s.distinct) + " descriptors, best " + fixed(s.best_value));
  return s;
}

RefineSummary run_refine(const std::filesystem::path& archive_path, int top_k, int threads,
                         const std::filesystem::path& out_path, const std::atomic<bool>* stop,
                         const LogFn& log) {
  const auto la = load_archive(archive_path);
  const auto ws = workspace_from_archive(la.header);
  if (top_k < 1) top_k = ws.config.refine_top_k;
  if (top_k < 1) throw ArgumentError("refine: top-k must be at least 1");
  const auto ranked = la.ranked();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(top_k), ranked.size());
  RefineSummary out;
  out.output = out_path;
  std::vector<std::optional<RefineReport>> reports(k);
  std::vector<std::string> errors(k);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> interrupted{false};
  auto work = [&] {
    for (std::size_t i = next++; i < k; i = next++) {
      if (stop != nullptr && stop->load()) {
        interrupted = true;
        return;
      }
      try {
        reports[i] = bfgs_refine(*ws.problem, ranked[i]->point);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::max<std::size_t>(1, std::min(workers, k));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream file(out_path, std::ios::trunc);
  if (!file) throw Error("cannot create '" + out_path.string() + "'");
  for (std::size_t i = 0; i < k; ++i) {
    json r = {{"type", "refine"}, {"rank", i + 1}, {"descriptor", ranked[i]->descriptor.to_string()}};
    if (reports[i]) {
      const auto& rep = *reports[i];
      r["input"] = {{"continuous", rep.input.continuous},
                    {"materials", rep.input.materials},
                    {"value", rep.input_value}};
      r["refined"] = {{"continuous", rep.refined.continuous},
                      {"materials", rep.refined.materials},
                      {"image_distance", rep.refined_image_distance},
                      {"value", rep.refined_value}};
      r["improvement"] = rep.improvement;
      r["iterations"] = rep.iterations;
      r["gradient_norm"] = rep.gradient_norm;
      r["reason"] = rep.reason;
      r["projections"] = rep.projections;
      r["descriptor_preserved"] = describe(ws.problem->lens(), rep.refined) == rep.descriptor;
      say(log, "rank " + std::to_string(i + 1) + " " + rep.descriptor.to_string() + ": " +
                   fixed(rep.input_value) + " -> " + fixed(rep.refined_value) + " (x" +
                   fixed(rep.improvement, 4) + ", " + std::to_string(rep.iterations) +
                   " iterations, " + rep.reason + ")");
      out.reports.push_back(rep);
    } else {
      r["error"] = errors[i].empty() ? std::string("not run") : errors[i];
      out.errors.push_back(r["error"]);
    }
    file << r.dump() << '\n';
  }
  out.interrupted = interrupted.load();
  return out;
}

std::string render_archive_rank(const std::filesystem::path& archive_path, int rank) {
  const auto la = load_archive(archive_path);
  const auto ranked = la.ranked();
  if (rank < 1 || static_cast<std::size_t>(rank) > ranked.size()) {
    throw ArgumentError("rank " + std::to_string(rank) + " outside 1.." +
                        std::to_string(ranked.size()));
  }
  const auto ws = workspace_from_archive(la.header);
  const auto* rec = ranked[rank - 1];
  const auto design = ws.problem->lens().instantiate(rec->point);
  return render_svg(design, *ws.catalog,
                    ws.problem->lens().name + " #" + std::to_string(rank) + "  " +
                        rec->descriptor.to_string() + "  F=" + fixed(rec->value));
}

}  // namespace ldgea
