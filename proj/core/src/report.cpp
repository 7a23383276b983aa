// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/report.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

#include "cbo/error.hpp"
#include "cbo/version.hpp"

namespace cbo {
namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> file_list(const ExperimentReport& report) {
  std::vector<std::string> files{"result.json"};
  for (const auto& table : report.tables) files.push_back(table.filename);
  if (!report.plot_script.empty()) files.emplace_back("plot.gp");
  return files;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k != 0) out += ',';
    out += table.header[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k != 0) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string render_result_json(const ExperimentReport& report, const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["tool"] = "cbo-lab";
  doc["version"] = kVersion;
  doc["command"] = to_string(report.command);
  doc["master_seed"] = report.master_seed;
  doc["config"] = config_to_json(config);
  doc["results"] = report.results;
  doc["files"] = file_list(report);
  return doc.dump(2) + "\n";
}

void preflight_output(const std::filesystem::path& directory) {
  std::error_code ec;
  if (std::filesystem::exists(directory, ec) && !std::filesystem::is_directory(directory, ec)) {
    throw IoError("output path '" + directory.string() + "' exists and is not a directory");
  }
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + directory.string() + "': " +
                  ec.message());
  }
  const auto probe = directory / ".cbo-lab-write-probe";
  {
    std::ofstream out(probe, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("output directory '" + directory.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const RunConfig& config) {
  preflight_output(config.output);
  std::vector<std::filesystem::path> written;
  for (const auto& table : report.tables) {
    written.push_back(config.output / table.filename);
    write_file(written.back(), render_csv(table));
  }
  if (!report.plot_script.empty()) {
    written.push_back(config.output / "plot.gp");
    write_file(written.back(), report.plot_script);
  }
  written.push_back(config.output / "result.json");
  write_file(written.back(), render_result_json(report, config));
  return written;
}

}  // namespace cbo
