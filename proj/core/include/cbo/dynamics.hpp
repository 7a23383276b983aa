// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbo/consensus.hpp"
#include "cbo/matrix.hpp"
#include "cbo/objectives.hpp"
#include "cbo/randomness.hpp"
#include "cbo/workers.hpp"

namespace cbo {

/// Parameters of the rescaled particle system
///   dX^i = -lambda (X^i - kappa m) dt + sigma (delta I + D(X^i - kappa m)) dB^i,
/// with m the weighted consensus point and D(v) = diag(|v_1|, ..., |v_d|).
/// kappa = 1 is the classical, unrescaled dynamics.
struct CBOParams {
  double lambda = 1.0;
  double sigma = 0.0;
  double alpha = 1.0;
  double kappa = 1.0;
  double delta = 0.0;
  double dt = 0.01;
  std::size_t steps = 1;
  std::size_t particles = 1;
  std::size_t dimension = 1;

  double horizon() const noexcept { return static_cast<double>(steps) * dt; }

  /// kappa in (0, 1], lambda > 0, sigma >= 0, delta >= 0, alpha > 0, dt > 0,
  /// lambda * dt < 1, positive N and d. Throws ConfigError.
  void validate() const;
};

struct Ensemble {
  Matrix positions;
  std::size_t step = 0;
  double time = 0.0;
};

/// Diagonal of D(v): the component-wise absolute values.
std::vector<double> anisotropic_diag(std::span<const double> v);

/// Explicit Euler-Maruyama stepping with the consensus frozen over each step.
/// Holds the scratch buffers so long runs do not allocate per step.
class Integrator {
 public:
  Integrator(const CBOParams& params, const NoisePlan& plan, WorkerPool* pool = nullptr);

  /// Evaluates the objective on every particle and returns the consensus
  /// point of the ensemble. Throws SimulationAbort on a non-finite value.
  std::span<const double> consensus(const Ensemble& ensemble, const Objective& objective);

  /// Objective values from the last call to consensus().
  std::span<const double> objective_values() const noexcept { return f_values_; }

  /// Writes the state after one step in which every particle drifts toward
  /// kappa * m. Particle i draws its increment from (plan, i, in.step), so
  /// two ensembles advanced with the same plan are synchronously coupled.
  void advance(const Ensemble& in, std::span<const double> m, Ensemble& out);

  const CBOParams& params() const noexcept { return params_; }
  const NoisePlan& plan() const noexcept { return plan_; }

 private:
  CBOParams params_;
  NoisePlan plan_;
  WorkerPool* pool_;
  ConsensusReducer reducer_;
  std::vector<double> f_values_;
};

Ensemble euler_step_interacting(const Ensemble& ensemble, const CBOParams& params,
                                const Objective& objective, const NoisePlan& plan,
                                WorkerPool* pool = nullptr);

/// Same update as euler_step_interacting with `m_proxy` in place of the
/// ensemble's own consensus point.
Ensemble euler_step_copies(const Ensemble& copies, std::span<const double> m_proxy,
                           const CBOParams& params, const NoisePlan& plan,
                           WorkerPool* pool = nullptr);

/// Steps at which simulate() records observables: step 0, every `stride`-th
/// step and the final step. stride == 0 records only the endpoints.
struct ObservationSchedule {
  std::size_t stride = 1;
  /// Even moment orders p for (1/N) sum |X^i|^p and |m|^p.
  std::vector<int> moment_orders;

  bool records(std::size_t step, std::size_t total_steps) const noexcept {
    return step == 0 || step == total_steps || (stride != 0 && step % stride == 0);
  }
};

struct Snapshot {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> consensus;
  std::vector<double> mean;
  /// One entry per schedule moment order.
  std::vector<double> moments;
  std::vector<double> consensus_moments;
  double f_min = 0.0;
  double f_max = 0.0;
};

struct Trajectory {
  std::vector<int> moment_orders;
  std::vector<Snapshot> snapshots;
  Ensemble initial_state;
  Ensemble final_state;
};

/// Plan for the initial data belonging to a noise plan: brownian noise pairs
/// with `initial` data, the reference ensemble keeps its own stream.
NoisePlan initial_data_plan(const NoisePlan& noise);

/// Samples N initial particles and runs `steps` Euler steps.
Trajectory simulate(const CBOParams& params, const Objective& objective, const NoisePlan& plan,
                    const InitialDistribution& init, const ObservationSchedule& schedule,
                    WorkerPool* pool = nullptr);

/// Observables of a state given its consensus point and objective values.
Snapshot observe(const Ensemble& ensemble, std::span<const double> consensus,
                 std::span<const double> f_values, std::span<const int> moment_orders);

/// (1/N) sum_i |x_i|^p for even p.
double empirical_moment(const Matrix& positions, int p);

/// Drift and diffusion coefficients of the dynamics evaluated at a Dirac
/// ensemble concentrated at z (whose consensus point is z itself).
struct DiracReport {
  std::vector<double> drift;      // lambda |z_k - kappa z_k|
  std::vector<double> diffusion;  // sigma (delta + |z_k - kappa z_k|)
  double drift_norm = 0.0;
  double diffusion_min = 0.0;
  bool drift_vanishes = false;
  bool diffusion_vanishes = false;
  /// Both coefficients vanish identically: the Dirac measure is invariant.
  bool invariant = false;
};

DiracReport dirac_fixed_point_check(std::span<const double> z, const CBOParams& params);

}  // namespace cbo
