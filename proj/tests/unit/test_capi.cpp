// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "ldgea/ldgea.h"

namespace fs = std::filesystem;

namespace {

const std::string kConfig = std::string(LDGEA_SOURCE_DIR) + "/configs/triplet_scaled.json";

fs::path fresh(const std::string& name) {
  const auto dir = fs::path(LDGEA_SCRATCH_DIR) / ("capi_" + name);
  fs::remove_all(dir);
  return dir;
}

ldg_config* load(std::vector<const char*> overrides) {
  ldg_config* c = nullptr;
  REQUIRE(ldg_config_load(kConfig.c_str(), overrides.data(), overrides.size(), &c) == LDG_OK);
  REQUIRE(c != nullptr);
  return c;
}

// A run small enough for a unit test.
ldg_config* tiny(std::vector<const char*> extra = {}) {
  std::vector<const char*> o{"ldgea.lambda=3", "ldgea.mu=1", "ldgea.iterations=1", "budget=150"};
  o.insert(o.end(), extra.begin(), extra.end());
  return load(o);
}

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("identity strings") {
    CHECK(std::strlen(ldg_version()) > 0);
    CHECK(std::string(ldg_status_name(LDG_OK)) != std::string(ldg_status_name(LDG_E_CONFIG)));
    CHECK(std::strlen(ldg_status_name(static_cast<ldg_status>(99))) > 0);
  }

  TEST_CASE("config handle") {
    ldg_config* c = load({"ldgea.lambda=8", "budget=2000", "ldgea.iterations=5"});
    int64_t b = 0;
    CHECK(ldg_config_baseline_budget(c, &b) == LDG_OK);
    CHECK(b == 80000);
    CHECK(std::string(ldg_config_json(c)).find("\"lambda\"") != std::string::npos);
    CHECK(ldg_config_set_threads(c, 2) == LDG_OK);
    CHECK(ldg_config_set_threads(c, -1) == LDG_E_ARGUMENT);
    CHECK(ldg_config_set_ablated(c, 1) == LDG_OK);
    CHECK(std::string(ldg_config_json(c)).find("\"ablated\": true") != std::string::npos);
    ldg_config_free(c);
    ldg_config_free(nullptr);
  }

  TEST_CASE("errors carry a status and a message") {
    ldg_config* c = nullptr;
    CHECK(ldg_config_load("/nonexistent.json", nullptr, 0, &c) == LDG_E_CONFIG);
    CHECK(c == nullptr);
    CHECK(std::strlen(ldg_last_error()) > 0);
    const char* bad[] = {"ldgea.nonsense=1"};
    CHECK(ldg_config_load(kConfig.c_str(), bad, 1, &c) == LDG_E_CONFIG);
    CHECK(std::string(ldg_last_error()).find("nonsense") != std::string::npos);
    CHECK(ldg_config_load(nullptr, nullptr, 0, &c) == LDG_E_ARGUMENT);
    CHECK(ldg_config_load(kConfig.c_str(), nullptr, 0, nullptr) == LDG_E_ARGUMENT);
    int64_t b = 0;
    CHECK(ldg_config_baseline_budget(nullptr, &b) == LDG_E_ARGUMENT);
  }

  TEST_CASE("missing catalog fails before any artifact is written") {
    ldg_config* c = tiny({"catalog=/nonexistent/catalog.csv"});
    const auto dir = fresh("missing_catalog");
    ldg_run_summary s{};
    CHECK(ldg_run(c, dir.c_str(), &s) == LDG_E_CONFIG);
    CHECK_FALSE(fs::exists(dir));
    CHECK(ldg_baseline(c, dir.c_str(), &s) == LDG_E_CONFIG);
    CHECK_FALSE(fs::exists(dir));
    ldg_config_free(c);
  }

  TEST_CASE("run, archive, render, refine and report") {
    std::vector<std::string> lines;
    ldg_set_log([](const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); },
                &lines);
    ldg_config* c = tiny({"threads=2"});
    const auto dir = fresh("run");
    ldg_run_summary s{};
    REQUIRE(ldg_run(c, dir.c_str(), &s) == LDG_OK);
    ldg_set_log(nullptr, nullptr);
    CHECK_FALSE(lines.empty());
    CHECK(s.iterations == 1);
    CHECK(s.budget == 3 * 150);
    CHECK(s.evaluations <= s.budget);
    CHECK(s.distinct_descriptors >= 1);
    CHECK(std::string(s.termination) == "iteration-cap");
    const auto archive = (dir / "archive.jsonl").string();
    CHECK(fs::exists(dir / "summary.json"));

    ldg_archive* a = nullptr;
    REQUIRE(ldg_archive_load(archive.c_str(), &a) == LDG_OK);
    CHECK(ldg_archive_candidates(a) == s.candidates);
    CHECK(ldg_archive_distinct(a) == s.distinct_descriptors);
    CHECK(ldg_archive_best(a) == s.best_value);
    ldg_archive_free(a);

    const auto svg = (dir / "best.svg").string();
    CHECK(ldg_render(archive.c_str(), 1, svg.c_str()) == LDG_OK);
    CHECK(fs::file_size(svg) > 0);
    CHECK(ldg_render(archive.c_str(), 100000, svg.c_str()) == LDG_E_ARGUMENT);
    CHECK(ldg_render(archive.c_str(), 0, svg.c_str()) == LDG_E_ARGUMENT);

    ldg_refine_summary r{};
    const auto refined = (dir / "refine.jsonl").string();
    CHECK(ldg_refine(archive.c_str(), 2, 2, refined.c_str(), &r) == LDG_OK);
    CHECK(r.refined + r.failed == std::min<int64_t>(2, s.candidates));
    CHECK(r.min_improvement >= 1.0 - 1e-9);
    CHECK(r.max_improvement >= r.min_improvement);

    const char* paths[] = {archive.c_str()};
    const auto rep = dir / "report";
    CHECK(ldg_report(paths, 1, rep.c_str()) == LDG_OK);
    CHECK(fs::exists(rep / "report.json"));
    CHECK(ldg_report(paths, 0, rep.c_str()) == LDG_E_ARGUMENT);
    ldg_config_free(c);
  }

  TEST_CASE("baseline spends exactly its equal-budget share") {
    ldg_config* c = load({"ldgea.lambda=2", "ldgea.mu=1", "ldgea.iterations=1", "budget=300"});
    const auto dir = fresh("baseline");
    ldg_run_summary s{};
    REQUIRE(ldg_baseline(c, dir.c_str(), &s) == LDG_OK);
    CHECK(s.budget == 600);
    CHECK(s.evaluations == 600);
    CHECK(s.distinct_descriptors >= 1);
    ldg_config_free(c);
  }

  TEST_CASE("stop request interrupts and flushes") {
    ldg_config* c = tiny();
    const auto dir = fresh("stop");
    ldg_request_stop();
    ldg_run_summary s{};
    CHECK(ldg_run(c, dir.c_str(), &s) == LDG_E_INTERRUPTED);
    ldg_clear_stop();
    CHECK(fs::exists(dir / "archive.jsonl"));
    CHECK(std::string(s.termination) == "interrupted");
    ldg_config_free(c);
  }
}
