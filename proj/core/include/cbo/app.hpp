// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "cbo/config.hpp"
#include "cbo/report.hpp"
#include "cbo/workers.hpp"

namespace cbo {

/// Runs the configured command. Throws ConfigError, SimulationAbort or IoError.
ExperimentReport run_command(const RunConfig& config, WorkerPool& pool);

/// A few human-readable lines for the terminal.
std::string summarize(const ExperimentReport& report);

}  // namespace cbo
