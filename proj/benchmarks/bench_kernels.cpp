// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "cbo/consensus.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/objectives.hpp"
#include "cbo/randomness.hpp"

namespace {

cbo::Matrix gaussian_cloud(std::size_t n, std::size_t d) {
  std::vector<double> mean(d, 2.0), var(d, 1.0);
  return cbo::sample_initial({1, cbo::Purpose::initial, d},
                             cbo::InitialDistribution::gaussian(mean, var), n);
}

void BM_Philox(benchmark::State& state) {
  cbo::PhiloxCounter ctr{0, 0, 0, 0};
  for (auto _ : state) {
    ctr = cbo::philox4x32(ctr, {7, 9});
    benchmark::DoNotOptimize(ctr);
  }
}
BENCHMARK(BM_Philox);

void BM_GaussianIncrements(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const cbo::NoisePlan plan{3, cbo::Purpose::brownian, d};
  std::vector<double> xi(d);
  std::uint64_t i = 0;
  for (auto _ : state) {
    cbo::standard_normals(plan, cbo::Channel::increments, i++ & 0xffff, 5, xi);
    benchmark::DoNotOptimize(xi.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianIncrements)->Arg(1)->Arg(2)->Arg(16);

void BM_Ackley(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const cbo::Objective f = cbo::Objective::ackley(d);
  const cbo::Matrix x = gaussian_cloud(1024, d);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.evaluate(x.row(i++ & 1023)));
  }
}
BENCHMARK(BM_Ackley)->Arg(1)->Arg(10);

void BM_ConsensusPoint(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const cbo::Matrix x = gaussian_cloud(n, 2);
  const cbo::Objective f = cbo::Objective::ackley(2);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = f.evaluate(x.row(i));
  cbo::ConsensusReducer reducer;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reducer.consensus_point(x, values, 10.0).data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConsensusPoint)->Arg(1'000)->Arg(80'000);

void BM_EulerStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  cbo::CBOParams p;
  p.lambda = 13.0;
  p.sigma = 2.0;
  p.kappa = 0.01;
  p.dt = 0.005;
  p.particles = n;
  p.dimension = 2;
  const cbo::Objective f = cbo::Objective::sphere(2);
  cbo::Integrator integrator(p, {4, cbo::Purpose::brownian, 2});
  cbo::Ensemble cur{gaussian_cloud(n, 2), 0, 0.0};
  cbo::Ensemble next;
  for (auto _ : state) {
    const auto m = integrator.consensus(cur, f);
    integrator.advance(cur, m, next);
    std::swap(cur, next);
    // Restart before the ensemble collapses into subnormal range.
    if (cur.step == 2000) cur = {gaussian_cloud(n, 2), 0, 0.0};
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerStep)->Arg(1'000)->Arg(80'000);

}  // namespace

BENCHMARK_MAIN();
