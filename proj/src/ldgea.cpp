// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/ldgea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "ldgea/error.hpp"

namespace ldgea {

void LdgeaSettings::validate() const {
  if (lambda < 1 || mu < 1 || mu > lambda) throw ConfigError("need 1 <= mu <= lambda");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (stagnation_window < 1) throw ConfigError("stagnation window must be at least 1");
  if (!(floor >= 0.0 && floor < 0.5)) throw ConfigError("probability floor must lie in [0, 0.5)");
  if (!(window >= 0.0)) throw ConfigError("quality window must be non-negative");
  if (threads < 0) throw ConfigError("thread cap must be non-negative");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::kIterationCap: return "iteration-cap";
    case StopReason::kStagnation: return "stagnation";
    case StopReason::kConverged: return "distribution-converged";
    case StopReason::kInterrupted: return "interrupted";
  }
  return "unknown";
}

std::vector<DescriptorEvaluation> stage1_evaluate(std::span<const Descriptor> descriptors,
                                                  int iteration, std::uint64_t master_seed,
                                                  int threads, const DescriptorEvaluator& eval,
                                                  const std::atomic<bool>* stop) {
  std::vector<DescriptorEvaluation> out(descriptors.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].descriptor = descriptors[i];
    out[i].seed = derive_seed(master_seed, static_cast<std::uint64_t>(iteration), i);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) {
      auto& slot = out[i];
      try {
        slot.result = eval(slot.descriptor, slot.seed, stop);
        slot.f = slot.result.best_value;
      } catch (const std::exception& e) {
        slot.error = e.what();
        slot.f = INFINITY;
      } catch (...) {
        slot.error = "unknown error";
        slot.f = INFINITY;
      }
      if (std::isnan(slot.f)) slot.f = INFINITY;
    }
  };
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, out.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

std::vector<std::size_t> select_top(std::span<const double> f,
                                    std::span<const Descriptor> descriptors, int mu) {
  if (f.size() != descriptors.size()) throw ArgumentError("select_top: size mismatch");
  if (mu < 0 || static_cast<std::size_t>(mu) > f.size()) {
    throw ArgumentError("select_top: mu exceeds the number of records");
  }
  std::vector<std::string> keys(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) keys[i] = descriptors[i].to_string();
  std::vector<std::size_t> idx(f.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto val = [&](std::size_t i) { return std::isnan(f[i]) ? INFINITY : f[i]; };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (val(a) != val(b)) return val(a) < val(b);
    return keys[a] < keys[b];
  });
  idx.resize(mu);
  return idx;
}

std::size_t RunResult::candidate_count() const {
  std::size_t n = 0;
  for (const auto& [d, a] : archive) n += a.size();
  return n;
}

RunResult::Best RunResult::best() const {
  Best b;
  for (const auto& [d, a] : archive) {
    if (!a.empty() && a.best_value() < b.value) {
      b.descriptor = &d;
      b.candidate = &a.entries().front();
      b.value = a.best_value();
    }
  }
  return b;
}

int merge_archive(GlobalArchive& global, const NicheArchive& from, double window) {
  if (from.empty()) return 0;
  auto [it, fresh] = global.try_emplace(from.tag(), from.tag(), window);
  for (const auto& c : from.entries()) archive_insert(it->second, from.tag(), c);
  return fresh ? 0 : 1;
}

RunResult ldgea_run(const DescriptorSpace& space, const LdgeaSettings& settings,
                    const DescriptorEvaluator& eval,
                    const std::function<void(const GenerationRecord&,
                                             std::span<const DescriptorEvaluation>)>&
                        on_generation) {
  settings.validate();
  RunResult run;
  auto p = DescriptorDistribution::uniform(space, settings.floor);
  p.apply_floor();
  const auto uniform = p;
  std::vector<double> best_after;  // b_t after each iteration
  auto stopped = [&] {
    return settings.stop != nullptr && settings.stop->load(std::memory_order_relaxed);
  };

  for (int t = 1; t <= settings.iterations; ++t) {
    if (stopped()) {
      run.reason = StopReason::kInterrupted;
      break;
    }
    const auto started = std::chrono::steady_clock::now();
    Rng rng(derive_seed(settings.seed, 0x5a3d1e, static_cast<std::uint64_t>(t)));
    GenerationRecord rec;
    rec.iteration = t;
    rec.distribution = settings.ablated ? uniform : p;
    rec.sampled = sample_batch(rec.distribution, space, static_cast<std::size_t>(settings.lambda),
                               rng, settings.sample_retries);
    const auto evals =
        stage1_evaluate(rec.sampled, t, settings.seed, settings.threads, eval, settings.stop);
    for (const auto& e : evals) {
      rec.f.push_back(e.f);
      rec.seeds.push_back(e.seed);
      rec.evaluations_per_slot.push_back(e.result.evaluations);
      rec.evaluations += e.result.evaluations;
      rec.merges += merge_archive(run.archive, e.result.archive, settings.window);
    }
    run.evaluations += rec.evaluations;
    rec.selected = select_top(rec.f, rec.sampled, settings.mu);
    std::vector<Descriptor> chosen;
    for (auto i : rec.selected) chosen.push_back(rec.sampled[i]);
    auto next = settings.ablated ? uniform : update(p, chosen, settings.alpha);
    rec.kl = kl_divergence(next, p);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const bool interrupted = stopped();
    run.generations.push_back(rec);
    if (on_generation) on_generation(run.generations.back(), evals);
    p = std::move(next);
    best_after.push_back(run.best().value);

    if (interrupted) {
      run.reason = StopReason::kInterrupted;
      break;
    }
    if (t == settings.iterations) {
      run.reason = StopReason::kIterationCap;
      break;
    }
    const int L = settings.stagnation_window;
    if (t > L) {
      const double then = best_after[t - 1 - L], now = best_after[t - 1];
      const bool both_inf = std::isinf(then) && std::isinf(now);
      if (both_inf || then - now < settings.stagnation_tol) {
        run.reason = StopReason::kStagnation;
        break;
      }
    }
    if (!settings.ablated && rec.kl < settings.kl_threshold) {
      run.reason = StopReason::kConverged;
      break;
    }
  }
  run.final_distribution = p;
  return run;
}

}  // namespace ldgea
