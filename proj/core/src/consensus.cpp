// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbo/error.hpp"

namespace cbo {

const WeightVector& ConsensusReducer::weights(std::span<const double> f_values, double alpha) {
  if (f_values.empty()) throw InputError("consensus: empty ensemble");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError("consensus: alpha must be positive and finite");
  }
  const std::size_t n = f_values.size();
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(f_values[i])) {
      throw InputError("consensus: non-finite objective value at index " + std::to_string(i));
    }
    if (f_values[i] < f_values[argmin]) argmin = i;
  }
  const double f_min = f_values[argmin];

  auto& w = weights_.normalized_weights;
  w.resize(n);
  partial_.assign(chunk_count(n), 0.0);
  for_each_chunk(pool_, n, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      w[i] = std::exp(-alpha * (f_values[i] - f_min));
      s += w[i];
    }
    partial_[c] = s;
  });
  double total = 0.0;
  for (double s : partial_) total += s;
  for_each_chunk(pool_, n, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) w[i] /= total;
  });

  weights_.log_partition_shifted = std::log(total);
  weights_.f_min = f_min;
  weights_.argmin = argmin;
  return weights_;
}

std::span<const double> ConsensusReducer::consensus_point(const Matrix& positions,
                                                          std::span<const double> f_values,
                                                          double alpha) {
  if (positions.rows() != f_values.size()) {
    throw InputError("consensus: " + std::to_string(positions.rows()) + " positions but " +
                     std::to_string(f_values.size()) + " objective values");
  }
  const WeightVector& wv = weights(f_values, alpha);
  const std::size_t n = positions.rows();
  const std::size_t d = positions.cols();
  const std::size_t chunks = chunk_count(n);
  const auto anchor = positions.row(wv.argmin);
  const auto& w = wv.normalized_weights;

  // Per chunk: d weighted offsets, d minima, d maxima.
  partial_.assign(chunks * 3 * d, 0.0);
  for_each_chunk(pool_, n, [&](std::size_t begin, std::size_t end, std::size_t c) {
    double* acc = partial_.data() + c * 3 * d;
    double* lo = acc + d;
    double* hi = lo + d;
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::numeric_limits<double>::infinity();
      hi[k] = -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = positions.row(i);
      for (std::size_t k = 0; k < d; ++k) {
        acc[k] += w[i] * (x[k] - anchor[k]);
        lo[k] = std::min(lo[k], x[k]);
        hi[k] = std::max(hi[k], x[k]);
      }
    }
  });

  consensus_.assign(d, 0.0);
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < chunks; ++c) {
    const double* acc = partial_.data() + c * 3 * d;
    for (std::size_t k = 0; k < d; ++k) {
      consensus_[k] += acc[k];
      lo[k] = std::min(lo[k], acc[d + k]);
      hi[k] = std::max(hi[k], acc[2 * d + k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    consensus_[k] = std::clamp(anchor[k] + consensus_[k], lo[k], hi[k]);
  }
  return consensus_;
}

WeightVector weights(std::span<const double> f_values, double alpha, WorkerPool* pool) {
  ConsensusReducer reducer(pool);
  return reducer.weights(f_values, alpha);
}

std::vector<double> consensus_point(const Matrix& positions, std::span<const double> f_values,
                                    double alpha, WorkerPool* pool) {
  ConsensusReducer reducer(pool);
  const auto m = reducer.consensus_point(positions, f_values, alpha);
  return {m.begin(), m.end()};
}

double laplace_functional(std::span<const double> f_values, double alpha, WorkerPool* pool) {
  ConsensusReducer reducer(pool);
  const WeightVector& w = reducer.weights(f_values, alpha);
  // log((1/N) S) <= 0 since every shifted exponential is at most one.
  const double log_mean = w.log_partition_shifted - std::log(static_cast<double>(f_values.size()));
  return w.f_min - std::min(log_mean, 0.0) / alpha;
}

}  // namespace cbo
