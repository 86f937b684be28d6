// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ldgea/descriptor.hpp"
#include "ldgea/hvea.hpp"

namespace ldgea {

struct LdgeaSettings {
  int lambda = 50;
  int mu = 5;
  double alpha = 1.0;
  int iterations = 15;
  int stagnation_window = 5;
  double stagnation_tol = 1e-6;
  double kl_threshold = 1e-4;
  double floor = 3e-3;
  int sample_retries = 10;
  double window = 0.5;
  bool ablated = false;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  const std::atomic<bool>* stop = nullptr;

  void validate() const;
};

/// Optimises one descriptor. Must be safe to call concurrently.
using DescriptorEvaluator =
    std::function<HveaResult(const Descriptor&, std::uint64_t seed, const std::atomic<bool>* stop)>;

struct DescriptorEvaluation {
  Descriptor descriptor;
  std::uint64_t seed = 0;
  HveaResult result;
  double f = INFINITY;
  std::string error;  // non-empty when the evaluation threw
};

/// Evaluates the batch on up to `threads` workers. Slot i of iteration t uses
/// seed derive_seed(master, t, i); results come back in input order.
std::vector<DescriptorEvaluation> stage1_evaluate(std::span<const Descriptor> descriptors,
                                                  int iteration, std::uint64_t master_seed,
                                                  int threads, const DescriptorEvaluator& eval,
                                                  const std::atomic<bool>* stop = nullptr);

/// Indices of the mu best entries, ordered by (f, descriptor string).
std::vector<std::size_t> select_top(std::span<const double> f,
                                    std::span<const Descriptor> descriptors, int mu);

enum class StopReason { kIterationCap, kStagnation, kConverged, kInterrupted };
const char* to_string(StopReason r);

struct GenerationRecord {
  int iteration = 0;
  std::vector<Descriptor> sampled;
  std::vector<double> f;
  std::vector<std::uint64_t> seeds;
  std::vector<long> evaluations_per_slot;
  std::vector<std::size_t> selected;  // indices into sampled
  DescriptorDistribution distribution;  // the model that produced `sampled`
  double kl = 0.0;                      // KL(next || distribution)
  long evaluations = 0;
  double wall_seconds = 0.0;
  int merges = 0;  // slots whose descriptor already had an archive
};

using GlobalArchive = std::map<Descriptor, NicheArchive>;

struct RunResult {
  std::vector<GenerationRecord> generations;
  GlobalArchive archive;
  DescriptorDistribution final_distribution;
  StopReason reason = StopReason::kIterationCap;
  long evaluations = 0;

  std::size_t distinct_descriptors() const { return archive.size(); }
  std::size_t candidate_count() const;
  /// Best archived entry; `descriptor` is null when the archive is empty.
  struct Best {
    const Descriptor* descriptor = nullptr;
    const Candidate* candidate = nullptr;
    double value = INFINITY;
  };
  Best best() const;
};

/// Merges every entry of `from` into the global archive under its tag.
int merge_archive(GlobalArchive& global, const NicheArchive& from, double window);

/// Outer loop: sample, evaluate, select, update, until a stop rule fires.
/// `on_generation` runs on the calling thread after each iteration.
RunResult ldgea_run(const DescriptorSpace& space, const LdgeaSettings& settings,
                    const DescriptorEvaluator& eval,
                    const std::function<void(const GenerationRecord&,
                                             std::span<const DescriptorEvaluation>)>&
                        on_generation = {});

}  // namespace ldgea
