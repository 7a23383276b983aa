// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cbo/error.hpp"

namespace cbo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double squared_norm(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double norm_power(std::span<const double> x, double ell) {
  const double ss = squared_norm(x);
  if (ell == 2.0) return ss;
  return std::pow(std::sqrt(ss), ell);
}

double tolerance(double a, double b) {
  return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void record(InequalityCheck& check, double margin, double scale,
            std::span<const double> a, std::span<const double> b = {}) {
  if (check.witness.empty() || margin < check.worst_margin) {
    check.worst_margin = margin;
    check.witness.assign(a.begin(), a.end());
    check.witness.insert(check.witness.end(), b.begin(), b.end());
  }
  if (margin < -scale) check.pass = false;
}

}  // namespace

Objective::Objective(Kind kind, std::string name, std::vector<double> minimizer)
    : kind_(kind), name_(std::move(name)), minimizer_(std::move(minimizer)) {
  if (minimizer_.empty()) throw InputError("objective dimension must be positive");
}

Objective Objective::ackley(std::size_t dimension, double shift) {
  Objective f(Kind::ackley, "ackley", std::vector<double>(dimension, shift));
  f.shift_ = shift;
  // Gradient of the exponential-radius term is bounded by 20 * 0.2, that of
  // the cosine term by 2 pi e.
  f.lipschitz_ = LocalLipschitz{20.0 * 0.2 + kTwoPi * std::numbers::e, 0.0};
  // Ackley is bounded, so the lower growth bound can only hold on a window.
  f.growth_ = GrowthBounds{1.0, 0.1, 3.0, 4.0, 22.0, 50.0};
  return f;
}

Objective Objective::sphere(std::size_t dimension) {
  Objective f(Kind::sphere, "sphere", std::vector<double>(dimension, 0.0));
  f.lipschitz_ = LocalLipschitz{1.0, 1.0};
  f.growth_ = GrowthBounds{2.0, 1.0, 0.0, 1.0, 0.0, std::nullopt};
  return f;
}

Objective Objective::shifted_quadratic(std::vector<double> center) {
  const double b2 = squared_norm(center);
  const double b = std::sqrt(b2);
  Objective f(Kind::shifted_quadratic, "shifted_quadratic", std::move(center));
  f.lipschitz_ = LocalLipschitz{std::max(1.0, 2.0 * b), 1.0};
  f.growth_ = GrowthBounds{2.0, 0.5, b2, 2.0, 2.0 * b2, std::nullopt};
  return f;
}

Objective Objective::rastrigin(std::vector<double> center) {
  const double d = static_cast<double>(center.size());
  const double c2 = squared_norm(center);
  const double c = std::sqrt(c2);
  Objective f(Kind::rastrigin, "rastrigin", std::move(center));
  f.lipschitz_ = LocalLipschitz{std::max(2.0, 2.0 * c + 10.0 * kTwoPi * std::sqrt(d)), 1.0};
  f.growth_ = GrowthBounds{2.0, 0.5, c2, 2.0, 2.0 * c2 + 20.0 * d, std::nullopt};
  return f;
}

double Objective::evaluate(std::span<const double> x) const noexcept {
  switch (kind_) {
    case Kind::ackley: {
      double sum_sq = 0.0;
      double sum_cos = 0.0;
      for (double v : x) {
        const double y = v - shift_;
        sum_sq += y * y;
        sum_cos += std::cos(kTwoPi * y);
      }
      const double d = static_cast<double>(x.size());
      return -20.0 * std::exp(-0.2 * std::sqrt(sum_sq / d)) - std::exp(sum_cos / d) +
             std::numbers::e + 20.0;
    }
    case Kind::sphere:
      return squared_norm(x);
    case Kind::shifted_quadratic: {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double y = x[k] - minimizer_[k];
        s += y * y;
      }
      return s;
    }
    case Kind::rastrigin: {
      double s = 10.0 * static_cast<double>(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double y = x[k] - minimizer_[k];
        s += y * y - 10.0 * std::cos(kTwoPi * y);
      }
      return s;
    }
  }
  return 0.0;
}

double Objective::operator()(std::span<const double> x) const {
  if (x.size() != dimension()) {
    std::ostringstream msg;
    msg << name_ << ": expected a point of dimension " << dimension() << ", got " << x.size();
    throw InputError(msg.str());
  }
  return evaluate(x);
}

double eval(const Objective& objective, std::span<const double> x) { return objective(x); }

std::vector<std::string> registered_objectives() {
  return {"ackley", "rastrigin", "shifted_quadratic", "sphere"};
}

Objective make_objective(const ObjectiveOptions& options) {
  if (options.dimension == 0) throw ConfigError("objective dimension must be positive");
  auto center_or_shift = [&] {
    if (options.center.empty()) return std::vector<double>(options.dimension, options.shift);
    if (options.center.size() != options.dimension) {
      throw ConfigError("objective center has " + std::to_string(options.center.size()) +
                        " entries but dimension is " + std::to_string(options.dimension));
    }
    return options.center;
  };
  if (options.name == "ackley") return Objective::ackley(options.dimension, options.shift);
  if (options.name == "sphere") return Objective::sphere(options.dimension);
  if (options.name == "rastrigin") return Objective::rastrigin(center_or_shift());
  if (options.name == "shifted_quadratic") {
    if (options.center.empty()) throw ConfigError("shifted_quadratic requires key 'center'");
    return Objective::shifted_quadratic(center_or_shift());
  }
  std::string names;
  for (const auto& n : registered_objectives()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("unknown objective '" + options.name + "'; registered: " + names);
}

AssumptionReport check_assumption(const Objective& objective, std::size_t sample_count,
                                  double radius, std::uint64_t seed) {
  if (!objective.growth() || !objective.local_lipschitz()) {
    throw ConfigError("objective '" + objective.name() +
                      "' lacks growth or local Lipschitz metadata");
  }
  if (!(radius > 0.0)) throw InputError("check_assumption: radius must be positive");
  const GrowthBounds& g = *objective.growth();
  const LocalLipschitz& lip = *objective.local_lipschitz();
  const std::size_t d = objective.dimension();
  const double f_min = objective.min_value();

  AssumptionReport report;
  report.samples = sample_count;
  report.radius = radius;
  report.bounded_below.name = "f >= f_min";
  report.lower_growth.name = "c_l |x|^ell - C_l <= f - f_min";
  report.upper_growth.name = "f - f_min <= c_u |x|^ell + C_u";
  report.lipschitz.name = "|f(x)-f(y)| <= L_f (1+|x|+|y|)^s |x-y|";

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  std::vector<double> x(d);
  std::vector<double> prev(d);
  double f_prev = 0.0;

  for (std::size_t j = 0; j < sample_count; ++j) {
    double ss = 0.0;
    for (auto& v : x) {
      v = normal(rng);
      ss += v * v;
    }
    const double scale = radius * std::pow(uniform(rng), 1.0 / static_cast<double>(d)) /
                         std::sqrt(ss);
    for (auto& v : x) v *= scale;

    const double f = objective.evaluate(x);
    const double excess = f - f_min;
    const double r_ell = norm_power(x, g.ell);

    record(report.bounded_below, excess, tolerance(f, f_min), x);
    const double lower = g.lower_slope * r_ell - g.lower_offset;
    record(report.lower_growth, excess - lower, tolerance(excess, lower), x);
    const double upper = g.upper_slope * r_ell + g.upper_offset;
    record(report.upper_growth, upper - excess, tolerance(excess, upper), x);

    if (j > 0) {
      double dist2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist2 += (x[k] - prev[k]) * (x[k] - prev[k]);
      const double bound = lip.constant *
                           std::pow(1.0 + std::sqrt(squared_norm(x)) + std::sqrt(squared_norm(prev)),
                                    lip.exponent) *
                           std::sqrt(dist2);
      const double diff = std::abs(f - f_prev);
      record(report.lipschitz, bound - diff, tolerance(bound, diff), x, prev);
    }
    prev = x;
    f_prev = f;
  }
  return report;
}

}  // namespace cbo
