// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <doctest.h>

#include "cbo/error.hpp"
#include "cbo/experiments.hpp"

using cbo::CBOParams;
using cbo::InitialDistribution;
using cbo::Objective;

namespace {

CBOParams regime(std::size_t steps) {
  CBOParams p;
  p.lambda = 13.0;
  p.sigma = 2.0;
  p.alpha = 1.0;
  p.kappa = 0.01;
  p.delta = 0.0;
  p.dt = 0.005;
  p.steps = steps;
  p.particles = 40;
  p.dimension = 2;
  return p;
}

const InitialDistribution kInit = InitialDistribution::gaussian({2.0, 2.0}, {1.0, 1.0});

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("log-log fit recovers a power law") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {10.0, 100.0, 1000.0}) pts.emplace_back(n, 3.0 * std::pow(n, -0.75));
    const auto fit = cbo::fit_loglog_slope(pts);
    CHECK(fit.slope == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    const std::vector<std::pair<double, double>> one{{1.0, 1.0}};
    CHECK_THROWS_AS(cbo::fit_loglog_slope(one), cbo::InputError);
    const std::vector<std::pair<double, double>> zero{{1.0, 1.0}, {2.0, 0.0}};
    CHECK_THROWS_AS(cbo::fit_loglog_slope(zero), cbo::InputError);
  }

  TEST_CASE("exact log-log fits") {
    const std::vector<std::pair<double, double>> two{{1.0, 1.0}, {10.0, 0.1}};
    const auto a = cbo::fit_loglog_slope(two);
    CHECK(a.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(a.intercept) < 1e-14);
    std::vector<std::pair<double, double>> inverse;
    for (double x : {1.0, 2.0, 4.0, 8.0}) inverse.emplace_back(x, 3.0 / x);
    const auto b = cbo::fit_loglog_slope(inverse);
    CHECK(b.slope == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(b.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  }

  TEST_CASE("noisy power law") {
    // Reference slope from an independent closed-form OLS.
    std::vector<std::pair<double, double>> pts;
    const double noise[] = {0.01, -0.008, 0.006, -0.01, 0.004, 0.009, -0.005};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < 7; ++k) {
      const double x = std::pow(2.0, k + 3);
      const double y = 5.0 / x * (1.0 + noise[k]);
      pts.emplace_back(x, y);
      sx += std::log(x);
      sy += std::log(y);
      sxx += std::log(x) * std::log(x);
      sxy += std::log(x) * std::log(y);
    }
    const double slope = (7 * sxy - sx * sy) / (7 * sxx - sx * sx);
    const auto fit = cbo::fit_loglog_slope(pts);
    CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(std::abs(fit.slope + 1.0) < 0.05);
  }

  TEST_CASE("a lone noiseless particle is its own optimum") {
    CBOParams p = regime(300);
    p.sigma = 0.0;
    p.kappa = 1.0;
    p.particles = 1;
    p.dimension = 2;
    const cbo::NoisePlan plan{6, cbo::Purpose::brownian, 2};
    const auto r = cbo::run_optimization(p, Objective::ackley(2), kInit, plan);
    const auto x0 = cbo::sample_initial(cbo::initial_data_plan(plan), kInit, 1);
    CHECK(r.x_star == std::vector<double>{x0(0, 0), x0(0, 1)});
  }

  TEST_CASE("rescaled dynamics locate the center of a quadratic") {
    CBOParams p;
    p.lambda = 4.0;
    p.sigma = 0.5;
    p.alpha = 50.0;
    p.kappa = 0.1;
    p.delta = 2.0;
    p.dt = 0.01;
    p.steps = 1000;
    p.particles = 10'000;
    p.dimension = 2;
    const std::vector<double> b{1.0, -0.5};
    const auto init = InitialDistribution::gaussian({0.0, 0.0}, {1.0, 1.0});
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto r = cbo::run_optimization(p, Objective::shifted_quadratic(b), init,
                                           {seed, cbo::Purpose::brownian, 2}, {0, {}});
      const double err = std::hypot(r.x_star[0] - b[0], r.x_star[1] - b[1]);
      CAPTURE(seed);
      CHECK(err < 0.2);
    }
  }

  TEST_CASE("optimization undoes the kappa rescaling") {
    CBOParams p = regime(400);
    p.lambda = 1.0;
    p.sigma = 0.0;
    p.kappa = 0.5;
    p.dt = 0.05;
    p.particles = 200;
    p.alpha = 50.0;
    const auto r = cbo::run_optimization(p, Objective::shifted_quadratic({1.0, -0.5}), kInit,
                                         {3, cbo::Purpose::brownian, 2});
    REQUIRE(r.x_star.size() == 2);
    CHECK(r.x_star[0] == doctest::Approx(r.raw_mean[0] / 0.5));
    CHECK(r.x_star[1] == doctest::Approx(r.raw_mean[1] / 0.5));
    CHECK(r.params_echo.kappa == 0.5);
  }

  TEST_CASE("copies driven by the system's own consensus reproduce it exactly") {
    cbo::MeanFieldOptions o;
    o.particle_counts = {20, 40};
    o.seeds = 2;
    o.stride = 5;
    o.proxy = cbo::ProxySource::own_consensus;
    for (double sigma : {0.0, 2.0}) {
      CBOParams p = regime(30);
      p.sigma = sigma;
      const auto curve = cbo::meanfield_error_curve(p, Objective::sphere(2), kInit, o);
      for (const auto& e : curve.entries) {
        CHECK(e.sup_t_mse == 0.0);
        for (double v : e.per_time_mse) CHECK(v == 0.0);
      }
      CHECK(std::isnan(curve.slope));
    }
  }

  TEST_CASE("mean-field error curve shape and prefix property") {
    cbo::MeanFieldOptions o;
    o.particle_counts = {10, 20};
    o.seeds = 3;
    o.reference_size = 2000;
    o.stride = 5;
    const auto short_curve = cbo::meanfield_error_curve(regime(20), Objective::sphere(2), kInit, o);
    const auto long_curve = cbo::meanfield_error_curve(regime(60), Objective::sphere(2), kInit, o);
    CHECK(short_curve.times.size() == 5);
    CHECK(long_curve.times.size() == 13);
    CHECK(short_curve.entries.size() == 2);
    CHECK(short_curve.seeds_used == 3);
    for (std::size_t e = 0; e < 2; ++e) {
      CHECK(short_curve.entries[e].per_time_mse[0] == 0.0);
      for (std::size_t t = 0; t < short_curve.times.size(); ++t) {
        CHECK(short_curve.entries[e].per_time_mse[t] == long_curve.entries[e].per_time_mse[t]);
      }
      CHECK(cbo::window_sup(long_curve, long_curve.entries[e], 0.0, 0.1) ==
            short_curve.entries[e].sup_t_mse);
    }
    CHECK(std::isfinite(short_curve.slope));
  }

  TEST_CASE("mean-field preconditions") {
    cbo::MeanFieldOptions o;
    o.particle_counts = {100};
    o.reference_size = 5000;
    CHECK_THROWS_AS(cbo::meanfield_error_curve(regime(10), Objective::sphere(2), kInit, o),
                    cbo::ConfigError);
  }

  TEST_CASE("moments of a noiseless Dirac ensemble stay constant") {
    CBOParams p = regime(50);
    p.sigma = 0.0;
    p.kappa = 1.0;
    const auto dirac = InitialDistribution::gaussian({0.5, -1.5}, {0.0, 0.0});
    const std::vector<int> orders{2, 4, 6};
    const auto series = cbo::moment_trajectory(p, Objective::ackley(2), dirac,
                                               {1, cbo::Purpose::brownian, 2}, orders, 5);
    const double r2 = 0.25 + 2.25;
    for (const auto& s : series) {
      const double expected = std::pow(r2, s.p / 2);
      for (double v : s.moment) CHECK(v == doctest::Approx(expected).epsilon(1e-14));
      for (double v : s.consensus_moment) CHECK(v == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("moment series and the late to early ratio") {
    const std::vector<int> orders{2, 4};
    const auto series = cbo::averaged_moment_trajectory(regime(40), Objective::sphere(2), kInit, 0,
                                                        3, orders, 10);
    REQUIRE(series.size() == 2);
    CHECK(series[0].p == 2);
    CHECK(series[0].times.size() == 5);
    CHECK(series[0].moment[0] > 0.0);

    cbo::MomentSeries s;
    s.times = {0.0, 1.0, 2.0, 3.0, 4.0};
    s.moment = {4.0, 3.0, 2.0, 1.0, 0.5};
    CHECK(cbo::late_to_early_ratio(s) == doctest::Approx(2.0 / 4.0));

    const std::vector<int> odd{3};
    CHECK_THROWS(cbo::moment_trajectory(regime(10), Objective::sphere(2), kInit,
                                        {0, cbo::Purpose::brownian, 2}, odd));
  }

  TEST_CASE("oracle ratio matches a direct weighted mean") {
    const auto sampling = InitialDistribution::gaussian({2.0}, {1.0});
    const Objective f = Objective::ackley(1);
    const auto [r, ess] = cbo::oracle_ratio(f, sampling, 5.0, 10'000, 9);
    const cbo::Matrix x = cbo::sample_rows({9, cbo::Purpose::reference, 1}, sampling, 0, 10'000);
    double num = 0.0, den = 0.0, den2 = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double w = std::exp(-5.0 * f.evaluate(x.row(i)));
      num += w * x(i, 0);
      den += w;
      den2 += w * w;
    }
    CHECK(r[0] == doctest::Approx(num / den).epsilon(1e-12));
    CHECK(ess == doctest::Approx(den * den / den2).epsilon(1e-9));
  }

  TEST_CASE("constant objective reduces the ratio estimator to a sample mean") {
    // alpha = 1e-12 makes the weights uniform to 1e-12, so MSE = Var(V) d / N.
    cbo::RatioOptions o;
    o.sample_sizes = {40, 400};
    o.trials = 400;
    o.oracle_size = 400'000;
    o.master_seed = 4;
    const auto sampling = InitialDistribution::gaussian({0.0, 0.0}, {1.0, 1.0});
    const auto curve = cbo::ratio_estimator_experiment(Objective::sphere(2), sampling, 1e-12, o);
    for (const auto& e : curve.entries) {
      const double expected = 2.0 / static_cast<double>(e.samples);
      CHECK(std::abs(e.mse - expected) < 5.0 * e.std_error + 1e-3 * expected);
    }
  }

  TEST_CASE("ratio estimator experiment") {
    cbo::RatioOptions o;
    o.sample_sizes = {50, 500};
    o.trials = 50;
    o.oracle_size = 100'000;
    const auto curve = cbo::ratio_estimator_experiment(
        Objective::ackley(1), InitialDistribution::gaussian({2.0}, {1.0}), 5.0, o);
    REQUIRE(curve.entries.size() == 2);
    CHECK(curve.entries[1].mse < curve.entries[0].mse);
    CHECK(curve.slope < 0.0);
    CHECK(curve.oracle_sample_size == 100'000);
    o.oracle_size = 1000;
    CHECK_THROWS_AS(cbo::ratio_estimator_experiment(Objective::ackley(1),
                                                    InitialDistribution::gaussian({2.0}, {1.0}),
                                                    5.0, o),
                    cbo::ConfigError);
  }

  TEST_CASE("validation levels") {
    CBOParams p = regime(10);
    const auto basic = cbo::validate_params(p, cbo::ValidationLevel::basic);
    CHECK_FALSE(basic.has_warnings());
    CHECK(basic.find("lambda_gt_3sigma2") == nullptr);
    const auto strict = cbo::validate_params(p, cbo::ValidationLevel::theorem);
    REQUIRE(strict.find("lambda_gt_3sigma2") != nullptr);
    CHECK(strict.find("lambda_gt_3sigma2")->status == cbo::Diagnostic::Status::pass);
    CHECK(strict.find("kappa_small")->status == cbo::Diagnostic::Status::pass);
    p.lambda = 1.0;
    p.kappa = 0.5;
    const auto loose = cbo::validate_params(p, cbo::ValidationLevel::theorem);
    CHECK(loose.has_warnings());
    CHECK(loose.find("lambda_gt_3sigma2")->status == cbo::Diagnostic::Status::warn);
    CHECK(loose.find("kappa_small")->status == cbo::Diagnostic::Status::warn);
    p.kappa = 1.5;
    CHECK_THROWS_AS(cbo::validate_params(p, cbo::ValidationLevel::basic), cbo::ConfigError);
  }
}
