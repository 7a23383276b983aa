// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "cbo/error.hpp"
#include "cbo/randomness.hpp"

using cbo::Channel;
using cbo::NoisePlan;
using cbo::Purpose;

TEST_SUITE("randomness") {
  TEST_CASE("philox known-answer vectors") {
    using C = cbo::PhiloxCounter;
    CHECK(cbo::philox4x32({0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(cbo::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(cbo::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("inverse normal cdf against reference quantiles") {
    const std::pair<double, double> table[] = {
        {1e-300, -37.0470962993612},  {1e-20, -9.262340089798409},
        {1e-10, -6.361340902404056},  {0.001, -3.090232306167813},
        {0.02425, -1.972961051311885}, {0.075, -1.4395314709384563},
        {0.3, -0.5244005127080409},   {0.5, 0.0},
        {0.925, 1.4395314709384563},  {0.999, 3.090232306167813}};
    for (const auto& [p, z] : table) {
      CAPTURE(p);
      CHECK(cbo::inverse_normal_cdf(p) == doctest::Approx(z).epsilon(1e-14));
    }
    for (double p : {0.01, 0.2, 0.45}) {
      CHECK(cbo::inverse_normal_cdf(p) ==
            doctest::Approx(-cbo::inverse_normal_cdf(1.0 - p)).epsilon(1e-15));
    }
  }

  TEST_CASE("draws are pure functions of their coordinates") {
    const NoisePlan plan{123, Purpose::brownian, 5};
    const auto a = cbo::gaussian_increment(plan, 7, 42);
    const auto b = cbo::gaussian_increment(plan, 7, 42);
    CHECK(a == b);
    CHECK(a != cbo::gaussian_increment(plan, 8, 42));
    CHECK(a != cbo::gaussian_increment(plan, 7, 43));
    CHECK(a != cbo::gaussian_increment({124, Purpose::brownian, 5}, 7, 42));
    CHECK(a != cbo::gaussian_increment({123, Purpose::reference, 5}, 7, 42));
  }

  TEST_CASE("shorter vectors are prefixes of longer ones") {
    std::vector<double> three(3), seven(7);
    cbo::standard_normals({9, Purpose::brownian, 3}, Channel::increments, 2, 5, three);
    cbo::standard_normals({9, Purpose::brownian, 7}, Channel::increments, 2, 5, seven);
    for (std::size_t k = 0; k < 3; ++k) CHECK(three[k] == seven[k]);
  }

  TEST_CASE("channels do not overlap") {
    std::vector<double> inc(2), data(2);
    const NoisePlan plan{1, Purpose::initial, 2};
    cbo::standard_normals(plan, Channel::increments, 0, 0, inc);
    cbo::standard_normals(plan, Channel::data, 0, 0, data);
    CHECK(inc != data);
  }

  TEST_CASE("uniforms stay in the open unit interval") {
    std::vector<double> u(4);
    for (std::uint64_t i = 0; i < 10'000; ++i) {
      cbo::uniforms({0, Purpose::initial, 4}, Channel::data, i, 0, u);
      for (double v : u) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
      }
    }
  }

  TEST_CASE("normal increments have unit mean-zero statistics") {
    constexpr std::size_t kDraws = 1'000'000;
    const NoisePlan plan{2024, Purpose::brownian, 2};
    double sum = 0.0, sq = 0.0, cross = 0.0, fourth = 0.0;
    std::vector<double> xi(2);
    for (std::size_t i = 0; i < kDraws / 2; ++i) {
      cbo::standard_normals(plan, Channel::increments, i, 3, xi);
      sum += xi[0] + xi[1];
      sq += xi[0] * xi[0] + xi[1] * xi[1];
      fourth += std::pow(xi[0], 4) + std::pow(xi[1], 4);
      cross += xi[0] * xi[1];
    }
    const double n = kDraws;
    // Tolerances are five standard errors.
    CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(fourth / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
    CHECK(std::abs(cross / (n / 2)) < 5.0 / std::sqrt(n / 2));
  }

  TEST_CASE("per-coordinate increment statistics over a million draws") {
    const NoisePlan plan{77, Purpose::brownian, 3};
    double sum[3] = {}, sq[3] = {};
    for (std::uint64_t i = 0; i < 1'000'000; ++i) {
      const auto xi = cbo::gaussian_increment(plan, i % 1000, i / 1000);
      for (int k = 0; k < 3; ++k) {
        sum[k] += xi[k];
        sq[k] += xi[k] * xi[k];
      }
    }
    for (int k = 0; k < 3; ++k) {
      const double mean = sum[k] / 1e6;
      CHECK(std::abs(mean) < 4e-3);
      CHECK(std::abs(sq[k] / 1e6 - mean * mean - 1.0) < 0.01);
    }
  }

  TEST_CASE("gaussian(2, 1) in one dimension") {
    const auto law = cbo::InitialDistribution::gaussian({2.0}, {1.0});
    const NoisePlan plan{6, Purpose::initial, 1};
    const cbo::Matrix big = cbo::sample_initial(plan, law, 100'000);
    const cbo::Matrix half = cbo::sample_initial(plan, law, 50'000);
    double mean = 0.0;
    for (std::size_t i = 0; i < big.rows(); ++i) {
      if (i < half.rows()) REQUIRE(half(i, 0) == big(i, 0));
      mean += big(i, 0);
    }
    CHECK(std::abs(mean / 100'000 - 2.0) < 0.02);
  }

  TEST_CASE("unit box samples stay inside") {
    const auto box = cbo::InitialDistribution::uniform({0.0, 0.0}, {1.0, 1.0});
    for (double v : cbo::sample_initial({8, Purpose::initial, 2}, box, 50'000).values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("initial samples follow the requested law") {
    const auto gauss = cbo::InitialDistribution::gaussian({2.0, -1.0}, {1.0, 4.0});
    const cbo::Matrix x = cbo::sample_initial({5, Purpose::initial, 2}, gauss, 200'000);
    double m0 = 0, m1 = 0, v1 = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      m0 += x(i, 0);
      m1 += x(i, 1);
      v1 += (x(i, 1) + 1.0) * (x(i, 1) + 1.0);
    }
    const double n = static_cast<double>(x.rows());
    CHECK(m0 / n == doctest::Approx(2.0).epsilon(0.01));
    CHECK(m1 / n == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(v1 / n == doctest::Approx(4.0).epsilon(0.02));

    const auto box = cbo::InitialDistribution::uniform({-1.0}, {3.0});
    const cbo::Matrix u = cbo::sample_initial({5, Purpose::initial, 1}, box, 100'000);
    double mean = 0;
    for (double v : u.values()) {
      CHECK(v >= -1.0);
      CHECK(v <= 3.0);
      mean += v;
    }
    CHECK(mean / 100'000 == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("sample rows can be drawn in pieces") {
    const auto gauss = cbo::InitialDistribution::gaussian({0.0}, {1.0});
    const NoisePlan plan{3, Purpose::reference, 1};
    const cbo::Matrix whole = cbo::sample_rows(plan, gauss, 0, 100, 0);
    const cbo::Matrix tail = cbo::sample_rows(plan, gauss, 60, 40, 0);
    for (std::size_t i = 0; i < 40; ++i) CHECK(tail(i, 0) == whole(60 + i, 0));
  }

  TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(cbo::InitialDistribution::gaussian({0.0}, {-1.0}), cbo::ConfigError);
    CHECK_THROWS_AS(cbo::InitialDistribution::uniform({1.0}, {0.0}), cbo::ConfigError);
    CHECK_THROWS_AS(cbo::InitialDistribution::gaussian({0.0, 1.0}, {1.0}), cbo::ConfigError);
    std::vector<double> out(1);
    CHECK_THROWS_AS(cbo::standard_normals({}, Channel::increments, std::uint64_t{1} << 32, 0, out),
                    cbo::InputError);
  }
}
