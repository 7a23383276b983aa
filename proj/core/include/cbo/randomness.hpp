// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cbo/matrix.hpp"

namespace cbo {

/// Independent random streams. The interacting system and its mean-field
/// copies share `brownian`; the proxy reference ensemble uses `reference`.
enum class Purpose : std::uint32_t { initial = 0, brownian = 1, reference = 2 };

std::string_view to_string(Purpose purpose) noexcept;

/// Every variate is a pure function of (master_seed, purpose, particle, step,
/// coordinate): the Philox4x32-10 block cipher is keyed by the seed and fed a
/// counter built from the remaining fields, so any variate can be produced in
/// any order by any thread.
struct NoisePlan {
  std::uint64_t master_seed = 0;
  Purpose purpose = Purpose::brownian;
  std::size_t dimension = 1;
};

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Inverse of the standard normal CDF for p in (0, 1), Wichura's AS241
/// (PPND16) rational approximations; relative accuracy about 1e-16.
double inverse_normal_cdf(double p) noexcept;

/// Which sub-stream of a purpose a variate is drawn from. Increments and
/// initial data never share counters.
enum class Channel : std::uint32_t { increments = 0, data = 1 };

/// Fills `out` with uniforms in (0, 1) for coordinates 0..out.size()-1 of
/// (particle, step) on the given channel. Throws InputError for indices that
/// do not fit the 32-bit counter words.
void uniforms(const NoisePlan& plan, Channel channel, std::uint64_t particle, std::uint64_t step,
              std::span<double> out);

/// Standard normals (variance one) for every coordinate of (particle, step).
/// The integrator scales them by sqrt(dt).
void standard_normals(const NoisePlan& plan, Channel channel, std::uint64_t particle,
                      std::uint64_t step, std::span<double> out);

/// Brownian increment direction xi for (particle, step), length plan.dimension.
std::vector<double> gaussian_increment(const NoisePlan& plan, std::uint64_t particle,
                                       std::uint64_t step);

/// Law of the initial particles.
struct InitialDistribution {
  enum class Kind { gaussian, uniform };
  Kind kind = Kind::gaussian;
  /// Gaussian: mean and diagonal variance. Uniform: lower and upper corners.
  std::vector<double> first;
  std::vector<double> second;

  static InitialDistribution gaussian(std::vector<double> mean, std::vector<double> variance);
  static InitialDistribution uniform(std::vector<double> low, std::vector<double> high);

  std::size_t dimension() const noexcept { return first.size(); }
  /// Throws ConfigError on mismatched lengths, negative variance or empty box.
  void validate() const;
};

/// Draws rows first_row .. first_row + count - 1. Row i depends only on
/// (master_seed, purpose, i, stream), so a larger sample extends a smaller one.
Matrix sample_rows(const NoisePlan& plan, const InitialDistribution& distribution,
                   std::uint64_t first_row, std::size_t count, std::uint64_t stream = 0);

/// `count` initial particles; row i depends only on (master_seed, purpose, i).
Matrix sample_initial(const NoisePlan& plan, const InitialDistribution& distribution,
                      std::size_t count);

}  // namespace cbo
