// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbo/config.hpp"

namespace cbo {

/// One CSV file: a header row followed by numeric rows.
struct CsvTable {
  std::string filename;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Everything a command produces, ready to be written.
struct ExperimentReport {
  Command command = Command::optimize;
  std::uint64_t master_seed = 0;
  /// Command-specific payload stored under "results" in result.json.
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<CsvTable> tables;
  /// gnuplot script; not written when empty.
  std::string plot_script;
};

/// printf("%.17g"); round-trips every finite double.
std::string format_double(double value);

std::string render_csv(const CsvTable& table);

/// Reproducibility envelope: version, command, master seed, the effective
/// configuration, the results and the list of emitted files.
std::string render_result_json(const ExperimentReport& report, const RunConfig& config);

/// Creates the output directory and probes that it is writable. Throws IoError.
void preflight_output(const std::filesystem::path& directory);

/// Writes result.json, every CSV table and plot.gp into config.output.
/// Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const RunConfig& config);

}  // namespace cbo
