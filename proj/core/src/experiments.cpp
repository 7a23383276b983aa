// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "cbo/consensus.hpp"
#include "cbo/error.hpp"

namespace cbo {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanAndError summarize(std::span<const double> values) {
  MeanAndError out;
  const double n = static_cast<double>(values.size());
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

double mean_squared_distance(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto x = a.row(i);
    const auto y = b.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) sum += (x[k] - y[k]) * (x[k] - y[k]);
  }
  return sum / static_cast<double>(a.rows());
}

void check_dimensions(const CBOParams& params, const Objective& objective,
                      const InitialDistribution& init) {
  if (objective.dimension() != params.dimension || init.dimension() != params.dimension) {
    throw ConfigError("objective, initial distribution and d must agree on the dimension");
  }
}

void check_orders(std::span<const int> orders) {
  if (orders.empty()) throw ConfigError("at least one moment order is required");
  for (int p : orders) {
    if (p < 2 || p > 8 || p % 2 != 0) {
      throw ConfigError("moment orders must be even and within [2, 8], got " + std::to_string(p));
    }
  }
}

LogLogFit fit_or_nan(const std::vector<std::pair<double, double>>& points) {
  const bool fittable =
      points.size() >= 2 && std::all_of(points.begin(), points.end(), [](const auto& p) {
        return p.first > 0.0 && p.second > 0.0 && std::isfinite(p.second);
      });
  if (!fittable) return {kNaN, kNaN};
  return fit_loglog_slope(points);
}

}  // namespace

OptimizationResult run_optimization(const CBOParams& params, const Objective& objective,
                                    const InitialDistribution& init, const NoisePlan& plan,
                                    const ObservationSchedule& schedule, WorkerPool* pool) {
  OptimizationResult result;
  result.params_echo = params;
  result.trajectory = simulate(params, objective, plan, init, schedule, pool);
  const Snapshot& last = result.trajectory.snapshots.back();
  result.raw_mean = last.mean;
  result.final_consensus = last.consensus;
  result.x_star.resize(last.mean.size());
  for (std::size_t k = 0; k < last.mean.size(); ++k) {
    result.x_star[k] = last.mean[k] / params.kappa;
  }
  result.objective_at_x_star = objective.evaluate(result.x_star);
  return result;
}

MeanFieldCurve meanfield_error_curve(const CBOParams& base, const Objective& objective,
                                     const InitialDistribution& init,
                                     const MeanFieldOptions& options, WorkerPool* pool) {
  base.validate();
  check_dimensions(base, objective, init);
  if (options.particle_counts.empty()) throw ConfigError("meanfield: empty N list");
  if (options.seeds == 0) throw ConfigError("meanfield: seeds must be positive");
  std::vector<std::size_t> counts = options.particle_counts;
  std::sort(counts.begin(), counts.end());
  if (counts.front() == 0) throw ConfigError("meanfield: N must be positive");
  const bool use_reference = options.proxy == ProxySource::reference_ensemble;
  if (use_reference && options.reference_size < 100 * counts.back()) {
    std::ostringstream msg;
    msg << "meanfield: M_ref = " << options.reference_size << " must be at least 100 * max(N) = "
        << 100 * counts.back();
    throw ConfigError(msg.str());
  }

  const std::size_t d = base.dimension;
  const std::size_t steps = base.steps;
  const ObservationSchedule grid{options.stride, {}};

  MeanFieldCurve curve;
  curve.seeds_used = options.seeds;
  curve.reference_size = use_reference ? options.reference_size : 0;
  for (std::size_t n = 0; n <= steps; ++n) {
    if (grid.records(n, steps)) curve.times.push_back(static_cast<double>(n) * base.dt);
  }
  const std::size_t n_times = curve.times.size();

  // samples[j][t * seeds + s]
  std::vector<std::vector<double>> samples(counts.size(),
                                           std::vector<double>(n_times * options.seeds));

  for (std::size_t s = 0; s < options.seeds; ++s) {
    const std::uint64_t seed = options.master_seed + s;
    std::vector<double> proxy;
    if (use_reference) {
      CBOParams ref_params = base;
      ref_params.particles = options.reference_size;
      const NoisePlan ref_plan{seed, Purpose::reference, d};
      Integrator ref(ref_params, ref_plan, pool);
      Ensemble cur{sample_initial(initial_data_plan(ref_plan), init, options.reference_size), 0,
                   0.0};
      Ensemble next;
      proxy.resize(steps * d);
      for (std::size_t n = 0; n < steps; ++n) {
        const auto m = ref.consensus(cur, objective);
        std::copy(m.begin(), m.end(), proxy.begin() + static_cast<std::ptrdiff_t>(n * d));
        ref.advance(cur, m, next);
        std::swap(cur, next);
      }
    }

    for (std::size_t j = 0; j < counts.size(); ++j) {
      CBOParams params = base;
      params.particles = counts[j];
      const NoisePlan plan{seed, Purpose::brownian, d};
      Integrator integrator(params, plan, pool);
      Ensemble x{sample_initial(initial_data_plan(plan), init, counts[j]), 0, 0.0};
      Ensemble x_bar = x;
      Ensemble x_next;
      Ensemble x_bar_next;
      std::vector<double> m_own(d);
      std::size_t t = 0;
      for (std::size_t n = 0; n <= steps; ++n) {
        if (grid.records(n, steps)) {
          samples[j][t * options.seeds + s] = mean_squared_distance(x.positions, x_bar.positions);
          ++t;
        }
        if (n == steps) break;
        const auto m = integrator.consensus(x, objective);
        std::copy(m.begin(), m.end(), m_own.begin());
        const std::span<const double> target =
            use_reference ? std::span<const double>(proxy.data() + n * d, d)
                          : std::span<const double>(m_own);
        integrator.advance(x, m_own, x_next);
        integrator.advance(x_bar, target, x_bar_next);
        std::swap(x, x_next);
        std::swap(x_bar, x_bar_next);
      }
    }
  }

  std::vector<std::pair<double, double>> points;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    MeanFieldEntry entry;
    entry.particles = counts[j];
    std::size_t best = 0;
    for (std::size_t t = 0; t < n_times; ++t) {
      const auto summary = summarize(
          std::span<const double>(samples[j].data() + t * options.seeds, options.seeds));
      entry.per_time_mse.push_back(summary.mean);
      entry.per_time_std_error.push_back(summary.std_error);
      if (summary.mean > entry.per_time_mse[best]) best = t;
    }
    entry.sup_t_mse = entry.per_time_mse[best];
    entry.std_error = entry.per_time_std_error[best];
    points.emplace_back(static_cast<double>(entry.particles), entry.sup_t_mse);
    curve.entries.push_back(std::move(entry));
  }
  const LogLogFit fit = fit_or_nan(points);
  curve.slope = fit.slope;
  curve.intercept = fit.intercept;
  curve.floor_estimate = use_reference ? std::exp(fit.intercept) /
                                             static_cast<double>(options.reference_size)
                                       : kNaN;
  return curve;
}

double window_sup(const MeanFieldCurve& curve, const MeanFieldEntry& entry, double t_lo,
                  double t_hi) {
  double sup = -std::numeric_limits<double>::infinity();
  const double eps = 1e-9 * std::max(1.0, std::abs(t_hi));
  for (std::size_t t = 0; t < curve.times.size(); ++t) {
    if (curve.times[t] >= t_lo - eps && curve.times[t] <= t_hi + eps) {
      sup = std::max(sup, entry.per_time_mse[t]);
    }
  }
  return sup;
}

std::vector<MomentSeries> moment_trajectory(const CBOParams& params, const Objective& objective,
                                            const InitialDistribution& init,
                                            const NoisePlan& plan, std::span<const int> orders,
                                            std::size_t stride, WorkerPool* pool) {
  check_orders(orders);
  const ObservationSchedule schedule{stride, {orders.begin(), orders.end()}};
  const Trajectory traj = simulate(params, objective, plan, init, schedule, pool);
  std::vector<MomentSeries> out;
  for (std::size_t q = 0; q < orders.size(); ++q) {
    MomentSeries series;
    series.p = orders[q];
    for (const Snapshot& snap : traj.snapshots) {
      series.times.push_back(snap.time);
      series.moment.push_back(snap.moments[q]);
      series.consensus_moment.push_back(snap.consensus_moments[q]);
    }
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<MomentSeries> averaged_moment_trajectory(const CBOParams& params,
                                                     const Objective& objective,
                                                     const InitialDistribution& init,
                                                     std::uint64_t master_seed, std::size_t seeds,
                                                     std::span<const int> orders,
                                                     std::size_t stride, WorkerPool* pool) {
  if (seeds == 0) throw ConfigError("moments: seeds must be positive");
  std::vector<MomentSeries> total;
  for (std::size_t s = 0; s < seeds; ++s) {
    const NoisePlan plan{master_seed + s, Purpose::brownian, params.dimension};
    auto series = moment_trajectory(params, objective, init, plan, orders, stride, pool);
    if (total.empty()) {
      total = std::move(series);
      continue;
    }
    for (std::size_t q = 0; q < total.size(); ++q) {
      for (std::size_t t = 0; t < total[q].times.size(); ++t) {
        total[q].moment[t] += series[q].moment[t];
        total[q].consensus_moment[t] += series[q].consensus_moment[t];
      }
    }
  }
  const double n = static_cast<double>(seeds);
  for (auto& series : total) {
    for (double& v : series.moment) v /= n;
    for (double& v : series.consensus_moment) v /= n;
  }
  return total;
}

double late_to_early_ratio(const MomentSeries& series) {
  if (series.times.empty()) throw InputError("late_to_early_ratio: empty series");
  const double half = 0.5 * series.times.back();
  double early = 0.0;
  double late = 0.0;
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    if (series.times[t] <= half) early = std::max(early, series.moment[t]);
    if (series.times[t] >= half) late = std::max(late, series.moment[t]);
  }
  return late / early;
}

std::pair<std::vector<double>, double> oracle_ratio(const Objective& objective,
                                                    const InitialDistribution& sampling,
                                                    double alpha, std::size_t count,
                                                    std::uint64_t master_seed) {
  if (count == 0) throw ConfigError("ratio: oracle size must be positive");
  const std::size_t d = objective.dimension();
  const NoisePlan plan{master_seed, Purpose::reference, d};
  const std::size_t chunks = chunk_count(count);
  auto chunk_rows = [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    return sample_rows(plan, sampling, begin, std::min(count, begin + kChunkSize) - begin);
  };

  double f_min = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < chunks; ++c) {
    const Matrix rows = chunk_rows(c);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      f_min = std::min(f_min, objective.evaluate(rows.row(i)));
    }
  }
  if (!std::isfinite(f_min)) throw ConfigError("ratio: non-finite objective on the oracle pool");

  double w_sum = 0.0;
  double w2_sum = 0.0;
  std::vector<double> wv_sum(d, 0.0);
  for (std::size_t c = 0; c < chunks; ++c) {
    const Matrix rows = chunk_rows(c);
    double w_chunk = 0.0;
    double w2_chunk = 0.0;
    std::vector<double> wv_chunk(d, 0.0);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      const auto v = rows.row(i);
      const double w = std::exp(-alpha * (objective.evaluate(v) - f_min));
      w_chunk += w;
      w2_chunk += w * w;
      for (std::size_t k = 0; k < d; ++k) wv_chunk[k] += w * v[k];
    }
    w_sum += w_chunk;
    w2_sum += w2_chunk;
    for (std::size_t k = 0; k < d; ++k) wv_sum[k] += wv_chunk[k];
  }
  for (double& v : wv_sum) v /= w_sum;
  return {wv_sum, w_sum * w_sum / w2_sum};
}

RatioMseCurve ratio_estimator_experiment(const Objective& objective,
                                         const InitialDistribution& sampling, double alpha,
                                         const RatioOptions& options, WorkerPool* pool) {
  if (!(alpha > 0.0) || alpha > 50.0) {
    throw ConfigError("ratio: alpha must lie in (0, 50] so the weights stay non-degenerate");
  }
  if (sampling.dimension() != objective.dimension()) {
    throw ConfigError("ratio: sampling distribution and objective dimensions differ");
  }
  if (options.sample_sizes.empty() || options.trials == 0) {
    throw ConfigError("ratio: need at least one sample size and one trial");
  }
  std::vector<std::size_t> sizes = options.sample_sizes;
  std::sort(sizes.begin(), sizes.end());
  if (sizes.front() == 0) throw ConfigError("ratio: sample sizes must be positive");
  if (options.oracle_size < 100 * sizes.back()) {
    throw ConfigError("ratio: oracle size must be at least 100 * max(N) = " +
                      std::to_string(100 * sizes.back()));
  }

  RatioMseCurve curve;
  curve.oracle_sample_size = options.oracle_size;
  std::tie(curve.reference_R, curve.oracle_effective_size) =
      oracle_ratio(objective, sampling, alpha, options.oracle_size, options.master_seed);
  if (curve.oracle_effective_size < 100.0) {
    throw ConfigError("ratio: weights are degenerate (oracle effective sample size " +
                      std::to_string(curve.oracle_effective_size) + ")");
  }

  const std::size_t d = objective.dimension();
  const NoisePlan plan{options.master_seed, Purpose::initial, d};
  ConsensusReducer reducer(pool);
  std::vector<std::pair<double, double>> points;
  std::vector<double> errors(options.trials);
  std::vector<double> f;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const std::size_t n = sizes[j];
    for (std::size_t t = 0; t < options.trials; ++t) {
      const Matrix batch = sample_rows(plan, sampling, t * n, n, 1 + j);
      f.resize(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = objective.evaluate(batch.row(i));
      const auto r_hat = reducer.consensus_point(batch, f, alpha);
      double err = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        err += (r_hat[k] - curve.reference_R[k]) * (r_hat[k] - curve.reference_R[k]);
      }
      errors[t] = err;
    }
    const auto summary = summarize(errors);
    curve.entries.push_back({n, summary.mean, summary.std_error});
    points.emplace_back(static_cast<double>(n), summary.mean);
  }
  const LogLogFit fit = fit_or_nan(points);
  curve.slope = fit.slope;
  curve.intercept = fit.intercept;
  return curve;
}

LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw InputError("fit_loglog_slope: need at least two points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw InputError("fit_loglog_slope: coordinates must be positive and finite");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw InputError("fit_loglog_slope: all x coordinates coincide");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

bool ValidationReport::has_warnings() const noexcept {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.status == Diagnostic::Status::warn; });
}

const Diagnostic* ValidationReport::find(const std::string& check) const noexcept {
  for (const auto& d : diagnostics) {
    if (d.check == check) return &d;
  }
  return nullptr;
}

std::string to_string(Diagnostic::Status status) {
  switch (status) {
    case Diagnostic::Status::pass: return "pass";
    case Diagnostic::Status::warn: return "warn";
    case Diagnostic::Status::info: return "info";
  }
  return "unknown";
}

std::string to_string(ValidationLevel level) {
  return level == ValidationLevel::basic ? "basic" : "theorem";
}

ValidationReport validate_params(const CBOParams& params, ValidationLevel level,
                                 double kappa_threshold) {
  params.validate();
  ValidationReport report;
  report.level = level;
  using S = Diagnostic::Status;
  report.diagnostics.push_back({"kappa_range", S::pass, "kappa in (0, 1]"});
  report.diagnostics.push_back({"lambda_dt", S::pass, "lambda * dt < 1"});
  if (level == ValidationLevel::basic) return report;

  std::ostringstream msg;
  const double bound = 3.0 * params.sigma * params.sigma;
  msg << "lambda = " << params.lambda << (params.lambda > bound ? " > " : " <= ")
      << "3 sigma^2 = " << bound;
  report.diagnostics.push_back(
      {"lambda_gt_3sigma2", params.lambda > bound ? S::pass : S::warn, msg.str()});

  msg.str("");
  msg << "kappa = " << params.kappa << (params.kappa < kappa_threshold ? " < " : " >= ")
      << "surrogate threshold " << kappa_threshold;
  report.diagnostics.push_back(
      {"kappa_small", params.kappa < kappa_threshold ? S::pass : S::warn, msg.str()});

  report.diagnostics.push_back(
      {"kappa_constants", S::info,
       "the exact kappa bounds 1/(2(1+L)) and 1/(2 C_1) involve constants that are not "
       "computable from the problem data; only the surrogate threshold is checked"});
  return report;
}

}  // namespace cbo
