// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cbo/error.hpp"

namespace cbo {
namespace {

void check_shape(const Matrix& positions, const CBOParams& params, const char* who) {
  if (positions.rows() != params.particles || positions.cols() != params.dimension) {
    std::ostringstream msg;
    msg << who << ": ensemble is " << positions.rows() << "x" << positions.cols()
        << " but parameters specify N=" << params.particles << ", d=" << params.dimension;
    throw InputError(msg.str());
  }
}

double integer_power(double base, int exponent) {
  double r = 1.0;
  for (int j = 0; j < exponent; ++j) r *= base;
  return r;
}

}  // namespace

void CBOParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(kappa > 0.0 && kappa <= 1.0)) fail("kappa must lie in (0, 1], got " + std::to_string(kappa));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("lambda must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma must be non-negative");
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail("delta must be non-negative");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive and finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(lambda * dt < 1.0)) {
    fail("explicit Euler stability guard violated: lambda * dt = " + std::to_string(lambda * dt) +
         " must be < 1");
  }
  if (particles == 0) fail("N must be positive");
  if (dimension == 0) fail("d must be positive");
}

std::vector<double> anisotropic_diag(std::span<const double> v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

Integrator::Integrator(const CBOParams& params, const NoisePlan& plan, WorkerPool* pool)
    : params_(params), plan_(plan), pool_(pool), reducer_(pool) {
  if (plan_.dimension != params_.dimension) {
    throw InputError("noise plan dimension does not match d");
  }
}

std::span<const double> Integrator::consensus(const Ensemble& ensemble,
                                              const Objective& objective) {
  const Matrix& x = ensemble.positions;
  if (objective.dimension() != x.cols()) {
    throw InputError("objective dimension does not match ensemble dimension");
  }
  f_values_.resize(x.rows());
  for_each_chunk(pool_, x.rows(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) {
      const double f = objective.evaluate(x.row(i));
      if (!std::isfinite(f)) {
        throw SimulationAbort(ensemble.step, "non-finite objective value at particle " +
                                                 std::to_string(i) + ", step " +
                                                 std::to_string(ensemble.step));
      }
      f_values_[i] = f;
    }
  });
  return reducer_.consensus_point(x, f_values_, params_.alpha);
}

void Integrator::advance(const Ensemble& in, std::span<const double> m, Ensemble& out) {
  const std::size_t n = in.positions.rows();
  const std::size_t d = in.positions.cols();
  if (m.size() != d) throw InputError("consensus point has the wrong dimension");

  // x' = kappa m + (1 - lambda dt) y + sigma sqrt(dt) (delta + |y|) xi, y = x - kappa m.
  // Algebraically the Euler step x - lambda y dt + ...; written around kappa m
  // so that lambda dt = 1 relaxes exactly onto the target.
  std::vector<double> target(d);
  for (std::size_t k = 0; k < d; ++k) target[k] = params_.kappa * m[k];
  const double keep = 1.0 - params_.lambda * params_.dt;
  const double noise = params_.sigma * std::sqrt(params_.dt);
  const double delta = params_.delta;

  out.positions.resize(n, d);
  out.step = in.step + 1;
  out.time = static_cast<double>(out.step) * params_.dt;

  for_each_chunk(pool_, n, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> xi(d);
    for (std::size_t i = begin; i < end; ++i) {
      standard_normals(plan_, Channel::increments, i, in.step, xi);
      const auto x = in.positions.row(i);
      auto x_next = out.positions.row(i);
      for (std::size_t k = 0; k < d; ++k) {
        const double y = x[k] - target[k];
        const double v = target[k] + keep * y + noise * (delta + std::abs(y)) * xi[k];
        if (!std::isfinite(v)) {
          throw SimulationAbort(in.step, "non-finite position at particle " + std::to_string(i) +
                                             " after step " + std::to_string(in.step));
        }
        x_next[k] = v;
      }
    }
  });
}

Ensemble euler_step_interacting(const Ensemble& ensemble, const CBOParams& params,
                                const Objective& objective, const NoisePlan& plan,
                                WorkerPool* pool) {
  check_shape(ensemble.positions, params, "euler_step_interacting");
  Integrator integrator(params, plan, pool);
  const auto m = integrator.consensus(ensemble, objective);
  const std::vector<double> frozen(m.begin(), m.end());
  Ensemble next;
  integrator.advance(ensemble, frozen, next);
  return next;
}

Ensemble euler_step_copies(const Ensemble& copies, std::span<const double> m_proxy,
                           const CBOParams& params, const NoisePlan& plan, WorkerPool* pool) {
  check_shape(copies.positions, params, "euler_step_copies");
  Integrator integrator(params, plan, pool);
  Ensemble next;
  integrator.advance(copies, m_proxy, next);
  return next;
}

NoisePlan initial_data_plan(const NoisePlan& noise) {
  NoisePlan plan = noise;
  if (noise.purpose == Purpose::brownian) plan.purpose = Purpose::initial;
  return plan;
}

double empirical_moment(const Matrix& positions, int p) {
  if (p < 2 || p % 2 != 0) throw InputError("moment order must be even and >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < positions.rows(); ++i) {
    double ss = 0.0;
    for (double v : positions.row(i)) ss += v * v;
    sum += integer_power(ss, p / 2);
  }
  return sum / static_cast<double>(positions.rows());
}

Snapshot observe(const Ensemble& ensemble, std::span<const double> consensus,
                 std::span<const double> f_values, std::span<const int> moment_orders) {
  const Matrix& x = ensemble.positions;
  Snapshot s;
  s.step = ensemble.step;
  s.time = ensemble.time;
  s.consensus.assign(consensus.begin(), consensus.end());
  s.mean.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    for (std::size_t k = 0; k < x.cols(); ++k) s.mean[k] += row[k];
  }
  for (double& v : s.mean) v /= static_cast<double>(x.rows());

  double m2 = 0.0;
  for (double v : consensus) m2 += v * v;
  for (int p : moment_orders) {
    s.moments.push_back(empirical_moment(x, p));
    s.consensus_moments.push_back(integer_power(m2, p / 2));
  }
  const auto [lo, hi] = std::minmax_element(f_values.begin(), f_values.end());
  s.f_min = *lo;
  s.f_max = *hi;
  return s;
}

Trajectory simulate(const CBOParams& params, const Objective& objective, const NoisePlan& plan,
                    const InitialDistribution& init, const ObservationSchedule& schedule,
                    WorkerPool* pool) {
  params.validate();
  if (objective.dimension() != params.dimension || init.dimension() != params.dimension) {
    throw ConfigError("objective, initial distribution and d must agree on the dimension");
  }
  for (int p : schedule.moment_orders) {
    if (p < 2 || p % 2 != 0) throw ConfigError("moment orders must be even and >= 2");
  }

  Trajectory traj;
  traj.moment_orders = schedule.moment_orders;
  Ensemble current{sample_initial(initial_data_plan(plan), init, params.particles), 0, 0.0};
  traj.initial_state = current;
  Ensemble next;
  Integrator integrator(params, plan, pool);

  for (std::size_t n = 0; n < params.steps; ++n) {
    const auto m = integrator.consensus(current, objective);
    if (schedule.records(n, params.steps)) {
      traj.snapshots.push_back(
          observe(current, m, integrator.objective_values(), schedule.moment_orders));
    }
    integrator.advance(current, m, next);
    std::swap(current, next);
  }
  const auto m = integrator.consensus(current, objective);
  traj.snapshots.push_back(
      observe(current, m, integrator.objective_values(), schedule.moment_orders));
  traj.final_state = std::move(current);
  return traj;
}

DiracReport dirac_fixed_point_check(std::span<const double> z, const CBOParams& params) {
  DiracReport r;
  r.drift.resize(z.size());
  r.diffusion.resize(z.size());
  double drift2 = 0.0;
  r.diffusion_min = z.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double offset = std::abs(z[k] - params.kappa * z[k]);
    r.drift[k] = params.lambda * offset;
    r.diffusion[k] = params.sigma * (params.delta + offset);
    drift2 += r.drift[k] * r.drift[k];
    r.diffusion_min = std::min(r.diffusion_min, r.diffusion[k]);
  }
  r.drift_norm = std::sqrt(drift2);
  r.drift_vanishes = std::all_of(r.drift.begin(), r.drift.end(), [](double v) { return v == 0.0; });
  r.diffusion_vanishes =
      std::all_of(r.diffusion.begin(), r.diffusion.end(), [](double v) { return v == 0.0; });
  r.invariant = r.drift_vanishes && r.diffusion_vanishes;
  return r;
}

}  // namespace cbo
