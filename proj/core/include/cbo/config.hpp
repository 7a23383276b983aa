// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cbo/dynamics.hpp"
#include "cbo/experiments.hpp"
#include "cbo/objectives.hpp"
#include "cbo/randomness.hpp"

namespace cbo {

enum class Command { optimize, meanfield, moments, ratio, validate };

std::string_view to_string(Command command) noexcept;
/// Throws ConfigError for unknown names.
Command parse_command(std::string_view name);

/// Fully resolved settings for one cbo-lab invocation.
struct RunConfig {
  Command command = Command::optimize;
  ObjectiveOptions objective;
  CBOParams params;
  InitialDistribution init;
  /// Particle counts (meanfield) or batch sizes (ratio).
  std::vector<std::size_t> n_list;
  std::size_t seeds = 1;
  std::size_t m_ref = 80'000;
  std::vector<int> p_list{2, 4};
  std::size_t stride = 10;
  std::size_t trials = 200;
  std::size_t oracle_size = 10'000'000;
  ValidationLevel level = ValidationLevel::theorem;
  double kappa_threshold = 0.1;
  std::filesystem::path output = "cbo-out";
  std::uint64_t seed = 0;
  /// Execution knob only; never part of the reproducibility envelope.
  std::size_t workers = 1;
};

/// Documented defaults for each command (see README).
RunConfig default_config(Command command);

/// Ordered key=value overrides applied after the file (command-line flags).
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses configuration text. Text starting with '{' is JSON; anything else is
/// the key-value format:
///
///   # comment
///   key = value            (applies to every command)
///   [meanfield]            (following keys apply only to `meanfield`)
///   n_list = 100, 200
///
/// Resolution order: defaults, top-level keys, the active command's section,
/// then `overrides`. Unknown keys and sections are rejected; the result has
/// passed the basic parameter validation.
RunConfig parse_config_text(Command command, std::string_view text,
                            const Overrides& overrides = {});

/// Reads `file` when given (IoError if unreadable), then parse_config_text.
RunConfig parse_config(Command command, const std::optional<std::filesystem::path>& file,
                       const Overrides& overrides = {});

/// Keys accepted in configuration files and overrides.
const std::vector<std::string>& config_keys();

/// The effective configuration as written to result.json.
nlohmann::ordered_json config_to_json(const RunConfig& config);

}  // namespace cbo
