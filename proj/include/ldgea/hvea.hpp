// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <functional>
#include <span>
#include <vector>

#include "ldgea/descriptor.hpp"
#include "ldgea/evostrat.hpp"

namespace ldgea {

/// A continuous parameter vector with its objective value. Materials are
/// implied by the owning archive's descriptor.
struct Candidate {
  std::vector<double> x;
  double value = INFINITY;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Per-descriptor archive with a quality window: every entry lies within
/// `window` of the best one. Entries are kept sorted ascending by value.
class NicheArchive {
 public:
  NicheArchive() = default;
  NicheArchive(Descriptor tag, double window);

  const Descriptor& tag() const { return tag_; }
  double window() const { return window_; }
  const std::vector<Candidate>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double best_value() const { return entries_.empty() ? INFINITY : entries_.front().value; }

  friend bool archive_insert(NicheArchive& archive, const Descriptor& tag, Candidate candidate);
  friend bool operator==(const NicheArchive&, const NicheArchive&) = default;

 private:
  Descriptor tag_;
  double window_ = 0.5;
  std::vector<Candidate> entries_;
};

/// Rejects values above best + window; otherwise inserts (after any equal
/// values) and evicts entries that fall out of the window. Non-finite values
/// are rejected. Throws ArgumentError when `tag` differs from the archive's.
bool archive_insert(NicheArchive& archive, const Descriptor& tag, Candidate candidate);

/// Same-basin test: true iff every one of `n_test` equally spaced interior
/// points of [a, b] is no worse than max(f_a, f_b) plus 1e-12 * max(1, |f|).
/// Stops at the first failing point.
bool hill_valley_test(std::span<const double> a, std::span<const double> b, double f_a,
                      double f_b, int n_test, const Objective& evaluate);

struct HveaConfig {
  EsConfig es;  // box, budget and seed are set per call
  long budget = 100000;
  double window = 0.5;
  int niche_cap = 16;
  int max_tests = 5;
  /// Exploration ends after this many consecutive uniform draws fall into
  /// known niches; 0 keeps exploring until the budget or the cap is hit.
  int explore_patience = 10;
  std::uint64_t seed = 0;
  const std::atomic<bool>* stop = nullptr;
  /// Optional closure check run on every archived point.
  std::function<Descriptor(std::span<const double>)> describe;
};

struct NicheSummary {
  std::vector<double> best;
  double value = INFINITY;
  long evaluations = 0;  // spent by its CMSA-ES runs
  Termination last_reason = Termination::kBudget;
};

struct HveaResult {
  NicheArchive archive;
  double best_value = INFINITY;
  std::vector<double> best;
  long evaluations = 0;
  int niche_count = 0;
  std::vector<NicheSummary> niches;
  bool interrupted = false;
};

/// Hill-valley niching inside one descriptor box, each niche refined by
/// CMSA-ES, all niche bests merged into one quality-window archive.
HveaResult hvea_run(const Objective& f, const Descriptor& descriptor, const Box& box,
                    const HveaConfig& cfg);

}  // namespace ldgea
