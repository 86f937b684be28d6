// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/hvea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ldgea/error.hpp"

namespace ldgea {

NicheArchive::NicheArchive(Descriptor tag, double window) : tag_(std::move(tag)), window_(window) {
  if (!(window >= 0.0)) throw ArgumentError("NicheArchive: window must be non-negative");
}

bool archive_insert(NicheArchive& archive, const Descriptor& tag, Candidate candidate) {
  if (tag != archive.tag_) {
    throw ArgumentError("archive_insert: descriptor " + tag.to_string() +
                        " does not match archive " + archive.tag_.to_string());
  }
  const double v = candidate.value;
  if (!std::isfinite(v)) return false;
  auto& e = archive.entries_;
  if (!e.empty() && v > e.front().value + archive.window_) return false;
  const auto pos = std::upper_bound(e.begin(), e.end(), v,
                                    [](double val, const Candidate& c) { return val < c.value; });
  e.insert(pos, std::move(candidate));
  const double limit = e.front().value + archive.window_;
  while (!e.empty() && e.back().value > limit) e.pop_back();
  return true;
}

bool hill_valley_test(std::span<const double> a, std::span<const double> b, double f_a,
                      double f_b, int n_test, const Objective& evaluate) {
  if (a.size() != b.size()) throw ArgumentError("hill_valley_test: dimension mismatch");
  if (std::equal(a.begin(), a.end(), b.begin())) return true;
  const double top = std::max(f_a, f_b);
  const double eps = 1e-12 * std::max(1.0, std::abs(top));
  std::vector<double> x(a.size());
  for (int k = 1; k <= n_test; ++k) {
    const double t = static_cast<double>(k) / (n_test + 1);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = a[i] + t * (b[i] - a[i]);
    const double fx = evaluate(x);
    if (!(fx <= top + eps)) return false;
  }
  return true;
}

namespace {

struct Niche {
  std::vector<double> best;
  double value = INFINITY;
  long evaluations = 0;
  Termination reason = Termination::kBudget;
};

struct Sample {
  std::vector<double> x;
  double value;
  int niche;  // -1: unassigned
};

double normalized_distance(std::span<const double> a, std::span<const double> b, const Box& box) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / box.width(i);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

HveaResult hvea_run(const Objective& f, const Descriptor& descriptor, const Box& box,
                    const HveaConfig& cfg) {
  if (cfg.budget <= 0) throw ArgumentError("hvea_run: budget must be positive");
  if (cfg.niche_cap < 1 || cfg.max_tests < 1) throw ArgumentError("hvea_run: bad niche settings");
  HveaResult out;
  out.archive = NicheArchive(descriptor, cfg.window);

  long used = 0;
  const Objective counted = [&](std::span<const double> x) {
    ++used;
    const double v = f(x);
    return std::isnan(v) ? INFINITY : v;
  };
  auto stopped = [&] { return cfg.stop != nullptr && cfg.stop->load(std::memory_order_relaxed); };

  EsConfig es = cfg.es;
  es.box = box;
  es.stop = cfg.stop;
  es.validate();
  const int lambda = es.resolved_lambda();
  const long slice = std::max<long>(1, cfg.budget / cfg.niche_cap);
  const std::size_t n = box.size();
  const double dim = static_cast<double>(n);
  Rng rng(cfg.seed);
  std::vector<Niche> niches;
  std::vector<Sample> samples;
  std::uint64_t es_runs = 0;

  // Initial step size: the box default, capped by the distance to the
  // nearest sample clustered into a different niche.
  auto niche_sigma = [&](int k) {
    double d = INFINITY;
    for (const auto& s : samples) {
      if (s.niche >= 0 && s.niche != k) d = std::min(d, normalized_distance(s.x, niches[k].best, box));
    }
    const double cap = 0.5 * d / std::sqrt(dim);
    return std::max(1e-3 * cfg.es.sigma0, std::min(cfg.es.sigma0, cap));
  };

  long draws = 0;
  // Hill-valley clustering of one sample against the known niches, nearest
  // first. Founds a niche when none matches; -1 when the budget or the
  // niche cap runs out first.
  auto classify = [&](const std::vector<double>& x, double fx) -> int {
    if (!niches.empty()) {
      std::vector<std::size_t> order(niches.size());
      std::vector<double> dist(niches.size());
      for (std::size_t k = 0; k < niches.size(); ++k) {
        order[k] = k;
        dist[k] = normalized_distance(x, niches[k].best, box);
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
      const double spacing = std::pow(1.0 / static_cast<double>(std::max<long>(draws, 1)), 1.0 / dim);
      for (std::size_t k : order) {
        const long room = cfg.budget - used;
        if (room <= 0) return -1;
        const int n_test = static_cast<int>(std::min<long>(
            {static_cast<long>(cfg.max_tests), 1 + static_cast<long>(dist[k] / spacing), room}));
        if (hill_valley_test(x, niches[k].best, fx, niches[k].value, n_test, counted)) {
          if (fx < niches[k].value) {
            niches[k].value = fx;
            niches[k].best = x;
          }
          return static_cast<int>(k);
        }
      }
      if (used >= cfg.budget) return -1;
    }
    if (static_cast<int>(niches.size()) >= cfg.niche_cap) return -1;
    Niche niche;
    niche.best = x;
    niche.value = fx;
    niches.push_back(std::move(niche));
    return static_cast<int>(niches.size()) - 1;
  };

  // A run whose best leaves the niche's basin does not move the niche; the
  // escaped point is clustered like a fresh sample instead.
  auto optimise = [&](int k) {
    const long room = cfg.budget - used - cfg.max_tests;
    if (room < lambda) return 0L;
    es.budget = std::min(slice, room);
    es.seed = derive_seed(cfg.seed, 0xe5, es_runs++);
    es.sigma0 = niche_sigma(k);
    const auto r = cmsa_es_run(counted, es, niches[k].best, niches[k].value);
    niches[k].evaluations += r.evaluations;
    niches[k].reason = r.reason;
    if (r.best_value < niches[k].value) {
      if (hill_valley_test(niches[k].best, r.best, niches[k].value, r.best_value, cfg.max_tests,
                           counted)) {
        niches[k].value = r.best_value;
        niches[k].best = r.best;
      } else {
        const int j = classify(r.best, r.best_value);
        samples.push_back({r.best, r.best_value, j});
      }
    }
    return r.evaluations;
  };

  // Initial batch, clustered best first.
  const long batch = std::min<long>(cfg.budget, std::max<long>(lambda, 10 * static_cast<long>(n)));
  for (long i = 0; i < batch && !stopped(); ++i) {
    auto x = box.sample_uniform(rng);
    const double fx = counted(x);
    ++draws;
    if (std::isfinite(fx)) samples.push_back({std::move(x), fx, -1});
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const Sample& a, const Sample& b) { return a.value < b.value; });
  for (auto& s : samples) {
    if (stopped()) break;
    s.niche = classify(s.x, s.value);
  }
  const int founded = static_cast<int>(niches.size());
  for (int k = 0; k < founded && used < cfg.budget && !stopped(); ++k) optimise(k);

  // Sequential exploration until new draws keep landing in known niches.
  int joined_in_a_row = 0;
  while (used < cfg.budget && static_cast<int>(niches.size()) < cfg.niche_cap && !stopped()) {
    if (!niches.empty() && cfg.budget - used <= lambda) break;
    if (cfg.explore_patience > 0 && joined_in_a_row >= cfg.explore_patience) break;
    auto x = box.sample_uniform(rng);
    const double fx = counted(x);
    ++draws;
    if (!std::isfinite(fx)) continue;
    const std::size_t before = niches.size();
    const int k = classify(x, fx);
    samples.push_back({std::move(x), fx, k});
    if (niches.size() == before) {
      ++joined_in_a_row;
      continue;
    }
    joined_in_a_row = 0;
    optimise(k);
  }

  // Remaining budget goes round-robin to the known niches.
  while (!niches.empty() && used < cfg.budget && !stopped()) {
    long spent = 0;
    for (int k = 0; k < static_cast<int>(niches.size()); ++k) {
      if (used >= cfg.budget || stopped()) break;
      spent += optimise(k);
    }
    if (spent == 0) break;
  }

  out.interrupted = stopped();
  for (const auto& niche : niches) {
    if (cfg.describe) {
      const Descriptor got = cfg.describe(niche.best);
      if (got != descriptor) {
        throw ArgumentError("hvea_run: point describes to " + got.to_string() + ", expected " +
                            descriptor.to_string());
      }
    }
    archive_insert(out.archive, descriptor, Candidate{niche.best, niche.value});
    out.niches.push_back({niche.best, niche.value, niche.evaluations, niche.reason});
  }
  out.niche_count = static_cast<int>(niches.size());
  out.evaluations = used;
  if (!out.archive.empty()) {
    out.best_value = out.archive.entries().front().value;
    out.best = out.archive.entries().front().x;
  }
  return out;
}

}  // namespace ldgea
