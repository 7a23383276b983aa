// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbo {

/// |f(x) - f(y)| <= lipschitz * (1 + |x| + |y|)^exponent * |x - y|.
struct LocalLipschitz {
  double constant = 1.0;
  double exponent = 0.0;
};

/// c_l |x|^ell - C_l <= f(x) - f_min <= c_u |x|^ell + C_u, optionally only
/// claimed inside a ball of radius `window`.
struct GrowthBounds {
  double ell = 2.0;
  double lower_slope = 1.0;
  double lower_offset = 0.0;
  double upper_slope = 1.0;
  double upper_offset = 0.0;
  std::optional<double> window;
};

/// A benchmark objective with its known global minimizer and the regularity
/// constants it satisfies. Evaluation is pure and thread-safe.
class Objective {
 public:
  enum class Kind { ackley, sphere, shifted_quadratic, rastrigin };

  /// Standard d-dimensional Ackley with every coordinate shifted by `shift`;
  /// for d = 1 this is -20 exp(-0.2|x-s|) - exp(cos(2 pi (x-s))) + e + 20.
  static Objective ackley(std::size_t dimension, double shift = 3.0);
  /// |x|^2.
  static Objective sphere(std::size_t dimension);
  /// |x - center|^2.
  static Objective shifted_quadratic(std::vector<double> center);
  /// 10 d + sum (x_k - c_k)^2 - 10 cos(2 pi (x_k - c_k)).
  static Objective rastrigin(std::vector<double> center);

  const std::string& name() const noexcept { return name_; }
  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return minimizer_.size(); }
  const std::vector<double>& global_minimizer() const noexcept { return minimizer_; }
  double min_value() const noexcept { return min_value_; }
  const std::optional<LocalLipschitz>& local_lipschitz() const noexcept { return lipschitz_; }
  const std::optional<GrowthBounds>& growth() const noexcept { return growth_; }

  Objective& set_local_lipschitz(std::optional<LocalLipschitz> v) {
    lipschitz_ = v;
    return *this;
  }
  Objective& set_growth(std::optional<GrowthBounds> v) {
    growth_ = v;
    return *this;
  }

  /// Throws InputError when x.size() != dimension().
  double operator()(std::span<const double> x) const;

  /// Hot-path evaluation; the caller guarantees x.size() == dimension().
  double evaluate(std::span<const double> x) const noexcept;

 private:
  Objective(Kind kind, std::string name, std::vector<double> minimizer);

  Kind kind_;
  std::string name_;
  std::vector<double> minimizer_;
  double shift_ = 0.0;
  double min_value_ = 0.0;
  std::optional<LocalLipschitz> lipschitz_;
  std::optional<GrowthBounds> growth_;
};

/// Dimension-checked evaluation.
double eval(const Objective& objective, std::span<const double> x);

/// Parameters that select a registered objective by name.
struct ObjectiveOptions {
  std::string name = "ackley";
  std::size_t dimension = 1;
  /// Scalar shift for ackley and for rastrigin when `center` is empty.
  double shift = 3.0;
  /// Center for shifted_quadratic (required) and rastrigin (optional).
  std::vector<double> center;
};

std::vector<std::string> registered_objectives();

/// Throws ConfigError for unknown names, listing the registered ones.
Objective make_objective(const ObjectiveOptions& options);

struct InequalityCheck {
  std::string name;
  bool pass = true;
  /// Smallest slack observed; negative means violated.
  double worst_margin = 0.0;
  /// Sample attaining the worst margin (two points concatenated for the
  /// Lipschitz pair check).
  std::vector<double> witness;
};

struct AssumptionReport {
  std::size_t samples = 0;
  double radius = 0.0;
  InequalityCheck bounded_below;
  InequalityCheck lower_growth;
  InequalityCheck upper_growth;
  InequalityCheck lipschitz;

  bool pass() const noexcept {
    return bounded_below.pass && lower_growth.pass && upper_growth.pass && lipschitz.pass;
  }
};

/// Samples points uniformly in the ball of the given radius and checks the
/// lower bound, both growth inequalities and the local Lipschitz bound (on
/// consecutive sample pairs). Throws ConfigError when metadata is missing.
AssumptionReport check_assumption(const Objective& objective, std::size_t sample_count,
                                  double radius, std::uint64_t seed);

}  // namespace cbo
