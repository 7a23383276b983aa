// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbo/matrix.hpp"
#include "cbo/workers.hpp"

namespace cbo {

/// Normalized Gibbs weights exp(-alpha f_i) / sum_j exp(-alpha f_j),
/// computed relative to the ensemble minimum so nothing overflows.
struct WeightVector {
  std::vector<double> normalized_weights;
  /// log sum_j exp(-alpha (f_j - f_min)); always >= 0.
  double log_partition_shifted = 0.0;
  double f_min = 0.0;
  /// First index attaining f_min.
  std::size_t argmin = 0;
};

/// Reusable buffers for the weighted-average reductions. All sums are
/// accumulated sequentially within fixed chunks of kChunkSize entries and the
/// chunk partials are combined in ascending index order, so results do not
/// depend on the worker count.
class ConsensusReducer {
 public:
  explicit ConsensusReducer(WorkerPool* pool = nullptr) : pool_(pool) {}

  /// Throws InputError on empty or non-finite f_values or non-positive alpha.
  const WeightVector& weights(std::span<const double> f_values, double alpha);

  /// sum_i w_i x_i. The sum is taken relative to the minimizing particle and
  /// clamped to the coordinate-wise hull of the rows, so a Dirac ensemble
  /// returns its atom exactly.
  std::span<const double> consensus_point(const Matrix& positions,
                                          std::span<const double> f_values, double alpha);

 private:
  WorkerPool* pool_;
  WeightVector weights_;
  std::vector<double> partial_;
  std::vector<double> consensus_;
};

WeightVector weights(std::span<const double> f_values, double alpha, WorkerPool* pool = nullptr);

std::vector<double> consensus_point(const Matrix& positions, std::span<const double> f_values,
                                    double alpha, WorkerPool* pool = nullptr);

/// -(1/alpha) log((1/N) sum_i exp(-alpha f_i)), evaluated as
/// f_min - (1/alpha) log((1/N) sum_i exp(-alpha (f_i - f_min))).
double laplace_functional(std::span<const double> f_values, double alpha,
                          WorkerPool* pool = nullptr);

}  // namespace cbo
