// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbo/dynamics.hpp"
#include "cbo/objectives.hpp"
#include "cbo/randomness.hpp"
#include "cbo/workers.hpp"

namespace cbo {

// ---------------------------------------------------------------------------
// Optimization (rescaled CBO algorithm): simulate to T, then undo the kappa
// rescaling of the ensemble mean.

struct OptimizationResult {
  /// raw_mean / kappa, component-wise.
  std::vector<double> x_star;
  std::vector<double> raw_mean;
  std::vector<double> final_consensus;
  double objective_at_x_star = 0.0;
  CBOParams params_echo;
  Trajectory trajectory;
};

OptimizationResult run_optimization(const CBOParams& params, const Objective& objective,
                                    const InitialDistribution& init, const NoisePlan& plan,
                                    const ObservationSchedule& schedule = {},
                                    WorkerPool* pool = nullptr);

// ---------------------------------------------------------------------------
// Coupled mean-field error. The mean-field consensus is unknown, so the copies
// drift toward the consensus trajectory of a large independent reference
// ensemble (or, for the exact-coupling sanity check, the interacting
// system's own consensus).

enum class ProxySource { reference_ensemble, own_consensus };

struct MeanFieldOptions {
  std::vector<std::size_t> particle_counts{100, 200, 400, 800};
  std::size_t seeds = 20;
  std::size_t reference_size = 80'000;
  /// Record every `stride` steps; the supremum over t is taken on this grid.
  std::size_t stride = 10;
  std::uint64_t master_seed = 0;
  ProxySource proxy = ProxySource::reference_ensemble;
};

struct MeanFieldEntry {
  std::size_t particles = 0;
  /// max over recorded t of the seed-averaged (1/N) sum_i |X_i(t) - Xbar_i(t)|^2.
  double sup_t_mse = 0.0;
  /// Standard error across seeds at the maximizing time.
  double std_error = 0.0;
  std::vector<double> per_time_mse;
  std::vector<double> per_time_std_error;
};

struct MeanFieldCurve {
  std::vector<double> times;
  std::vector<MeanFieldEntry> entries;
  /// log-log least-squares fit of sup_t_mse against N; NaN when some error is 0.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t seeds_used = 0;
  std::size_t reference_size = 0;
  /// exp(intercept) / reference_size: the error floor the proxy introduces.
  double floor_estimate = 0.0;
};

/// Runs seed s with master seed options.master_seed + s. Throws ConfigError
/// when the reference ensemble is smaller than 100 * max(N).
MeanFieldCurve meanfield_error_curve(const CBOParams& base, const Objective& objective,
                                     const InitialDistribution& init,
                                     const MeanFieldOptions& options,
                                     WorkerPool* pool = nullptr);

/// Maximum of the entry's seed-averaged error over recorded t in [t_lo, t_hi].
double window_sup(const MeanFieldCurve& curve, const MeanFieldEntry& entry, double t_lo,
                  double t_hi);

// ---------------------------------------------------------------------------
// Moment tracking.

struct MomentSeries {
  int p = 2;
  std::vector<double> times;
  /// (1/N) sum_i |X_i(t)|^p
  std::vector<double> moment;
  /// |m(t)|^p
  std::vector<double> consensus_moment;
};

/// Even orders 2 <= p <= 8, recorded every `stride` steps.
std::vector<MomentSeries> moment_trajectory(const CBOParams& params, const Objective& objective,
                                            const InitialDistribution& init,
                                            const NoisePlan& plan, std::span<const int> orders,
                                            std::size_t stride = 10, WorkerPool* pool = nullptr);

/// Seed-averaged moment series; seed s uses master seed master_seed + s.
std::vector<MomentSeries> averaged_moment_trajectory(const CBOParams& params,
                                                     const Objective& objective,
                                                     const InitialDistribution& init,
                                                     std::uint64_t master_seed, std::size_t seeds,
                                                     std::span<const int> orders,
                                                     std::size_t stride = 10,
                                                     WorkerPool* pool = nullptr);

/// max of the moment over [T/2, T] divided by its max over [0, T/2].
double late_to_early_ratio(const MomentSeries& series);

// ---------------------------------------------------------------------------
// Weighted ratio estimator R_N = sum w_j V_j / sum w_j with w_j = exp(-alpha f(V_j)).

struct RatioOptions {
  std::vector<std::size_t> sample_sizes{100, 1'000, 10'000};
  std::size_t trials = 200;
  std::size_t oracle_size = 10'000'000;
  std::uint64_t master_seed = 0;
};

struct RatioEntry {
  std::size_t samples = 0;
  double mse = 0.0;
  double std_error = 0.0;
};

struct RatioMseCurve {
  std::vector<RatioEntry> entries;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> reference_R;
  std::size_t oracle_sample_size = 0;
  /// (sum w)^2 / sum w^2 over the oracle pool.
  double oracle_effective_size = 0.0;
};

/// The target R is estimated once from an oracle pool drawn from the
/// `reference` stream; trial batches come from the `initial` stream.
RatioMseCurve ratio_estimator_experiment(const Objective& objective,
                                         const InitialDistribution& sampling, double alpha,
                                         const RatioOptions& options, WorkerPool* pool = nullptr);

/// Exact weighted mean over the first `count` rows of the oracle pool, computed
/// by streaming chunks. Returns {R, effective sample size}.
std::pair<std::vector<double>, double> oracle_ratio(const Objective& objective,
                                                    const InitialDistribution& sampling,
                                                    double alpha, std::size_t count,
                                                    std::uint64_t master_seed);

// ---------------------------------------------------------------------------

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of log y on log x. Throws InputError for fewer than
/// two points or non-positive coordinates.
LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

// ---------------------------------------------------------------------------

enum class ValidationLevel { basic, theorem };

struct Diagnostic {
  enum class Status { pass, warn, info };
  std::string check;
  Status status = Status::pass;
  std::string message;
};

struct ValidationReport {
  ValidationLevel level = ValidationLevel::basic;
  std::vector<Diagnostic> diagnostics;

  bool has_warnings() const noexcept;
  const Diagnostic* find(const std::string& check) const noexcept;
};

std::string to_string(Diagnostic::Status status);
std::string to_string(ValidationLevel level);

/// Basic violations throw ConfigError. The theorem level adds the sufficient
/// condition lambda > 3 sigma^2 (warning only) and compares kappa with a
/// user-chosen surrogate for the non-computable kappa bounds.
ValidationReport validate_params(const CBOParams& params, ValidationLevel level,
                                 double kappa_threshold = 0.1);

}  // namespace cbo
