// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "cbo/error.hpp"
#include "cbo/report.hpp"
#include "cbo/version.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cbo-report-test-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("doubles use seventeen significant digits") {
    CHECK(cbo::format_double(0.1) == "0.10000000000000001");
    CHECK(cbo::format_double(100.0) == "100");
    CHECK(std::stod(cbo::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }

  TEST_CASE("mean-field table schema") {
    cbo::CsvTable t{"meanfield.csv", {"N", "sup_t_mse", "stderr"}, {}};
    for (double n : {100.0, 200.0, 400.0, 800.0}) t.rows.push_back({n, 1.0 / n, 0.1 / n});
    const std::string csv = cbo::render_csv(t);
    CHECK(csv.rfind("N,sup_t_mse,stderr\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.find("\n100,0.01,0.001\n") != std::string::npos);
  }

  TEST_CASE("empty report still gives valid JSON with the envelope") {
    cbo::RunConfig config = cbo::default_config(cbo::Command::moments);
    config.output = scratch("empty");
    cbo::ExperimentReport report;
    report.command = cbo::Command::moments;
    report.master_seed = 77;
    report.results["series"] = nlohmann::ordered_json::array();
    report.tables.push_back({"moments.csv", {"time"}, {}});
    const auto files = cbo::emit_report(report, config);
    CHECK(files.size() == 2);
    const auto doc = nlohmann::json::parse(slurp(config.output / "result.json"));
    CHECK(doc["version"] == cbo::kVersion);
    CHECK(doc["master_seed"] == 77);
    CHECK(doc["command"] == "moments");
    CHECK(doc["config"]["lambda"] == 13.0);
    CHECK(doc["results"]["series"].empty());
    CHECK(slurp(config.output / "moments.csv") == "time\n");
    CHECK_FALSE(fs::exists(config.output / "plot.gp"));
    fs::remove_all(config.output);
  }

  TEST_CASE("rendering is deterministic") {
    cbo::RunConfig config = cbo::default_config(cbo::Command::ratio);
    cbo::ExperimentReport report;
    report.results["x"] = 0.1;
    CHECK(cbo::render_result_json(report, config) == cbo::render_result_json(report, config));
  }

  TEST_CASE("unwritable output fails preflight") {
    const fs::path file = scratch("file");
    { std::ofstream(file) << "x"; }
    CHECK_THROWS_AS(cbo::preflight_output(file), cbo::IoError);
    CHECK_THROWS_AS(cbo::preflight_output(file / "sub"), cbo::IoError);
    fs::remove(file);
  }
}
