// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

// cbo-lab <command> --config <path> [--seed S] [--out DIR] [--workers W]
//
// Exit codes: 0 success, 2 configuration error, 3 simulation abort, 4 IO error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbo/app.hpp"
#include "cbo/config.hpp"
#include "cbo/error.hpp"
#include "cbo/report.hpp"
#include "cbo/version.hpp"
#include "cbo/workers.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSimulationAbort = 3;
constexpr int kIoError = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus-based optimization experiments", "cbo-lab"};
  app.set_version_flag("--version", std::string(cbo::kVersion));

  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::vector<std::string> sets;
  bool quiet = false;

  app.add_option("command", command, "optimize | meanfield | moments | ratio | validate")
      ->required()
      ->check(CLI::IsMember({"optimize", "meanfield", "moments", "ratio", "validate"}));
  app.add_option("-c,--config", config_path, "Configuration file (key = value or JSON)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("-o,--out", out, "Output directory");
  app.add_option("-w,--workers", workers, "Worker threads (default: $CBO_LAB_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "Override a configuration key: --set key=value");
  app.add_flag("-q,--quiet", quiet, "Print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    cbo::Overrides overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw cbo::ConfigError("--set expects key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) overrides.emplace_back("seed", std::to_string(*seed));
    if (out) overrides.emplace_back("out", *out);

    std::optional<std::filesystem::path> file;
    if (!config_path.empty()) file = config_path;
    cbo::RunConfig config = cbo::parse_config(cbo::parse_command(command), file, overrides);
    config.workers = workers ? *workers : cbo::default_worker_count();

    // Fail on an unusable output directory before any simulation starts.
    cbo::preflight_output(config.output);

    cbo::WorkerPool pool(config.workers);
    const cbo::ExperimentReport report = cbo::run_command(config, pool);
    const auto written = cbo::emit_report(report, config);
    if (!quiet) {
      std::cout << cbo::summarize(report);
      std::cout << "wrote " << written.size() << " files to " << config.output.string() << "\n";
    }
    return 0;
  } catch (const cbo::ConfigError& e) {
    std::cerr << "cbo-lab: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cbo::InputError& e) {
    std::cerr << "cbo-lab: configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cbo::SimulationAbort& e) {
    std::cerr << "cbo-lab: simulation aborted after step " << e.last_healthy_step() << ": "
              << e.what() << "\n";
    return kSimulationAbort;
  } catch (const cbo::IoError& e) {
    std::cerr << "cbo-lab: I/O error: " << e.what() << "\n";
    return kIoError;
  }
}
