// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbo {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments to a pure function (dimension mismatch, empty input,
/// non-finite values).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration (out-of-range kappa, unknown keys,
/// missing metadata).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A simulation produced a non-finite objective value or position.
class SimulationAbort : public Error {
 public:
  SimulationAbort(std::size_t last_healthy_step, const std::string& what)
      : Error(what), last_healthy_step_(last_healthy_step) {}

  /// Last step whose state was entirely finite; the update leaving it failed.
  std::size_t last_healthy_step() const noexcept { return last_healthy_step_; }

 private:
  std::size_t last_healthy_step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbo
