// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Archive files are newline-delimited JSON. Record types:
//   header      run identity, algorithm, absolute input paths, window, config
//   candidate   one archived design (descriptor, parameters, value, breakdown)
//   generation  one outer iteration (sampled descriptors, f, selection, KL)
//   end         termination reason and evaluation total
// Non-finite numbers are written as null. Timestamps live only in fields
// named "timestamp".

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ldgea/ldgea.hpp"
#include "ldgea/merit.hpp"

namespace ldgea {

std::string utc_timestamp();

nlohmann::json breakdown_json(const MeritBreakdown& b);
nlohmann::json distribution_json(const DescriptorDistribution& d);

/// Appends records to an archive file; flush() makes them durable.
class ArchiveWriter {
 public:
  ArchiveWriter(const std::filesystem::path& path, const nlohmann::json& header);
  void write(const nlohmann::json& record);
  void flush();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct ArchiveRecord {
  int iteration = 0;
  int slot = 0;
  Descriptor descriptor;
  DesignPoint point;
  double value = INFINITY;
  nlohmann::json extra;  // breakdown and algorithm-specific fields
};

struct GenerationSummary {
  int iteration = 0;
  std::vector<Descriptor> descriptors;
  std::vector<double> f;
  std::vector<std::size_t> selected;
  double kl = 0.0;
  long evaluations = 0;
};

struct LoadedArchive {
  std::filesystem::path path;
  nlohmann::json header;
  std::string algorithm;
  std::string run_id;
  double window = INFINITY;
  std::vector<ArchiveRecord> candidates;  // file order
  std::vector<GenerationSummary> generations;
  GlobalArchive archive;  // rebuilt by replaying archive_insert
  bool complete = false;
  std::string termination;
  long evaluations = 0;

  /// Candidates of the rebuilt archive sorted by (value, descriptor, order).
  std::vector<const ArchiveRecord*> ranked() const;
};

/// Throws ConfigError when the file is missing or malformed.
LoadedArchive load_archive(const std::filesystem::path& path);

/// Lower-case hex of a 64-bit FNV-1a hash; used for run identifiers.
std::string fnv1a_hex(const std::string& text);

}  // namespace ldgea
