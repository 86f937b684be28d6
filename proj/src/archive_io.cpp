// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/archive_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>

#include "ldgea/error.hpp"

namespace ldgea {

using nlohmann::json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json breakdown_json(const MeritBreakdown& b) {
  return {{"mean_square", b.mean_square},
          {"rms", b.rms},
          {"penalties", b.penalties},
          {"total", b.total},
          {"census",
           {{"total", b.census.total},
            {"alive", b.census.alive},
            {"vignetted", b.census.vignetted},
            {"tir", b.census.total_internal_reflection},
            {"missed", b.census.missed},
            {"turned_back", b.census.turned_back},
            {"empty_fields", b.census.empty_fields}}}};
}

json distribution_json(const DescriptorDistribution& d) {
  return {{"p_plus", d.p_plus}, {"categorical", d.categorical}, {"floor", d.floor}};
}

ArchiveWriter::ArchiveWriter(const std::filesystem::path& path, const json& header)
    : path_(path), out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) throw Error("cannot create archive '" + path.string() + "'");
  write(header);
  flush();
}

void ArchiveWriter::write(const json& record) {
  out_ << record.dump() << '\n';
  if (!out_) throw Error("write failed on '" + path_.string() + "'");
}

void ArchiveWriter::flush() {
  out_.flush();
  if (!out_) throw Error("flush failed on '" + path_.string() + "'");
}

namespace {

double number_or_inf(const json& v) {
  return v.is_null() ? INFINITY : v.get<double>();
}

}  // namespace

std::vector<const ArchiveRecord*> LoadedArchive::ranked() const {
  // Map archive entries back to file records by (descriptor, x, value).
  std::vector<const ArchiveRecord*> out;
  std::map<Descriptor, std::vector<const ArchiveRecord*>> by_tag;
  for (const auto& r : candidates) by_tag[r.descriptor].push_back(&r);
  for (const auto& [tag, arch] : archive) {
    auto& pool = by_tag[tag];
    std::vector<bool> used(pool.size(), false);
    for (const auto& e : arch.entries()) {
      for (std::size_t k = 0; k < pool.size(); ++k) {
        if (!used[k] && pool[k]->value == e.value && pool[k]->point.continuous == e.x) {
          used[k] = true;
          out.push_back(pool[k]);
          break;
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ArchiveRecord* a, const ArchiveRecord* b) {
    if (a->value != b->value) return a->value < b->value;
    return a->descriptor.to_string() < b->descriptor.to_string();
  });
  return out;
}

LoadedArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open archive '" + path.string() + "'");
  LoadedArchive a;
  a.path = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json r = json::parse(line, nullptr, false);
    if (r.is_discarded() || !r.is_object() || !r.contains("type")) {
      throw ConfigError(where + ": malformed record");
    }
    try {
      const std::string type = r.at("type");
      if (line_no == 1 && type != "header") throw ConfigError(where + ": missing header");
      if (type == "header") {
        a.header = r;
        a.algorithm = r.at("algorithm");
        a.run_id = r.at("run_id");
        a.window = number_or_inf(r.at("window"));
      } else if (type == "candidate") {
        ArchiveRecord c;
        c.iteration = r.at("iteration");
        c.slot = r.value("slot", 0);
        c.descriptor = Descriptor::parse(r.at("descriptor").get<std::string>());
        c.point.continuous = r.at("continuous").get<std::vector<double>>();
        c.point.materials = r.at("materials").get<std::vector<int>>();
        c.value = number_or_inf(r.at("value"));
        for (const auto& [k, v] : r.items()) {
          if (k != "type" && k != "iteration" && k != "slot" && k != "descriptor" &&
              k != "continuous" && k != "materials" && k != "value") {
            c.extra[k] = v;
          }
        }
        auto [it, fresh] = a.archive.try_emplace(c.descriptor, c.descriptor, a.window);
        archive_insert(it->second, c.descriptor, Candidate{c.point.continuous, c.value});
        a.candidates.push_back(std::move(c));
      } else if (type == "generation") {
        GenerationSummary g;
        g.iteration = r.at("iteration");
        for (const auto& d : r.at("descriptors")) g.descriptors.push_back(Descriptor::parse(d.get<std::string>()));
        for (const auto& v : r.at("f")) g.f.push_back(number_or_inf(v));
        g.selected = r.at("selected").get<std::vector<std::size_t>>();
        g.kl = number_or_inf(r.at("kl"));
        g.evaluations = r.at("evaluations");
        a.generations.push_back(std::move(g));
      } else if (type == "end") {
        a.complete = true;
        a.termination = r.at("termination");
        a.evaluations = r.at("evaluations");
      } else {
        throw ConfigError(where + ": unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const ArgumentError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (a.header.is_null()) throw ConfigError("archive '" + path.string() + "' is empty");
  return a;
}

}  // namespace ldgea
