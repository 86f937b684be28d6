// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ldgea/error.hpp"

namespace ldgea {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Moments {
  int n = 0;
  double mean = NAN, sd = NAN, min = INFINITY;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  double s = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    ++m.n;
    s += x;
    m.min = std::min(m.min, x);
  }
  if (m.n == 0) return m;
  m.mean = s / m.n;
  double ss = 0.0;
  for (double x : v) {
    if (std::isfinite(x)) ss += (x - m.mean) * (x - m.mean);
  }
  m.sd = std::sqrt(ss / m.n);
  return m;
}

bool is_baseline(const std::string& algorithm) { return algorithm.rfind("cma-es", 0) == 0; }

}  // namespace

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return INFINITY;
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

ArchiveStats archive_stats(const LoadedArchive& a) {
  ArchiveStats s;
  s.label = a.path.string();
  s.algorithm = a.algorithm;
  s.run_id = a.run_id;
  s.seed = a.header.value("seed", std::uint64_t{0});
  std::vector<double> values;
  for (const auto& [d, arch] : a.archive) {
    for (const auto& e : arch.entries()) values.push_back(e.value);
  }
  std::sort(values.begin(), values.end());
  s.candidates = values.size();
  s.distinct = a.archive.size();
  if (!values.empty()) {
    s.best = values.front();
    s.worst = values.back();
  }
  s.p10 = percentile(values, 0.10);
  s.p50 = percentile(values, 0.50);
  s.p90 = percentile(values, 0.90);
  s.evaluations = a.evaluations;
  s.complete = a.complete;
  s.termination = a.termination;
  return s;
}

Report build_report(const std::vector<LoadedArchive>& archives) {
  Report r;
  std::vector<ArchiveStats> stats;
  for (const auto& a : archives) stats.push_back(archive_stats(a));

  json list = json::array();
  for (const auto& s : stats) {
    list.push_back({{"path", s.label},
                    {"algorithm", s.algorithm},
                    {"run_id", s.run_id},
                    {"seed", s.seed},
                    {"candidates", s.candidates},
                    {"distinct_descriptors", s.distinct},
                    {"best", s.best},
                    {"worst", s.worst},
                    {"p10", s.p10},
                    {"p50", s.p50},
                    {"p90", s.p90},
                    {"evaluations", s.evaluations},
                    {"complete", s.complete},
                    {"termination", s.termination}});
  }
  std::set<Descriptor> all;
  std::map<std::string, std::set<Descriptor>> per_algorithm;
  for (const auto& a : archives) {
    for (const auto& [d, arch] : a.archive) {
      all.insert(d);
      per_algorithm[a.algorithm].insert(d);
    }
  }
  json union_by_algorithm = json::object();
  for (const auto& [alg, set] : per_algorithm) union_by_algorithm[alg] = set.size();

  // Baseline solutions at least as good as the worst solution of each
  // non-baseline archive.
  json cross = json::array();
  for (std::size_t b = 0; b < archives.size(); ++b) {
    if (!is_baseline(archives[b].algorithm)) continue;
    for (std::size_t l = 0; l < archives.size(); ++l) {
      if (is_baseline(archives[l].algorithm)) continue;
      std::size_t count = 0;
      for (const auto& [d, arch] : archives[b].archive) {
        for (const auto& e : arch.entries()) count += e.value <= stats[l].worst ? 1 : 0;
      }
      cross.push_back({{"baseline", stats[b].label},
                       {"reference", stats[l].label},
                       {"reference_worst", stats[l].worst},
                       {"baseline_at_least_as_good", count},
                       {"baseline_candidates", stats[b].candidates},
                       {"distinct_ratio", static_cast<double>(stats[l].distinct) /
                                             static_cast<double>(stats[b].distinct)}});
    }
  }
  r.summary = {{"archives", list},
               {"union_distinct_descriptors", all.size()},
               {"union_distinct_by_algorithm", union_by_algorithm},
               {"comparisons", cross}};

  std::ostringstream csv;
  csv << "archive,algorithm,seed,iteration,finite,mean_f,std_f,min_f,evaluations\n";
  std::map<std::pair<std::string, int>, std::vector<double>> means;
  for (std::size_t k = 0; k < archives.size(); ++k) {
    for (const auto& g : archives[k].generations) {
      const auto m = moments(g.f);
      csv << k << ',' << archives[k].algorithm << ',' << stats[k].seed << ',' << g.iteration << ','
          << m.n << ',' << num(m.mean) << ',' << num(m.sd) << ',' << num(m.min) << ','
          << g.evaluations << '\n';
      if (m.n > 0) means[{archives[k].algorithm, g.iteration}].push_back(m.mean);
    }
  }
  r.iterations_csv = csv.str();

  std::ostringstream agg;
  agg << "algorithm,iteration,runs,mean_of_means,std_of_means\n";
  for (const auto& [key, v] : means) {
    const auto m = moments(v);
    agg << key.first << ',' << key.second << ',' << m.n << ',' << num(m.mean) << ','
        << num(m.sd) << '\n';
  }
  r.iterations_mean_csv = agg.str();
  return r;
}

void write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write '" + (dir / name).string() + "'");
  };
  put("report.json", r.summary.dump(2) + "\n");
  put("iterations.csv", r.iterations_csv);
  put("iterations_mean.csv", r.iterations_mean_csv);
}

}  // namespace ldgea
