// Copyright 2026 The cbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "cbo/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbo/error.hpp"

namespace cbo {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

[[noreturn, gnu::cold, gnu::noinline]] void counter_overflow(const char* what) {
  throw InputError(std::string(what) + " index exceeds the 32-bit counter range");
}

inline std::uint32_t checked_word(std::uint64_t value, const char* what) {
  if (value > std::numeric_limits<std::uint32_t>::max()) [[unlikely]] counter_overflow(what);
  return static_cast<std::uint32_t>(value);
}

// Each Philox block yields two 64-bit words, i.e. two coordinates.
template <class Transform>
void fill(const NoisePlan& plan, Channel channel, std::uint64_t particle, std::uint64_t step,
          std::span<double> out, Transform transform) {
  const PhiloxKey key{static_cast<std::uint32_t>(plan.master_seed),
                      static_cast<std::uint32_t>(plan.master_seed >> 32)};
  const std::uint32_t stream =
      (static_cast<std::uint32_t>(plan.purpose) << 1) | static_cast<std::uint32_t>(channel);
  const std::uint32_t p = checked_word(particle, "particle");
  const std::uint32_t n = checked_word(step, "step");
  for (std::size_t k = 0; k < out.size(); k += 2) {
    const std::uint32_t block = static_cast<std::uint32_t>(k / 2);
    const auto r = philox4x32({p, n, block, stream}, key);
    out[k] = transform(to_open_unit(r[0], r[1]));
    if (k + 1 < out.size()) out[k + 1] = transform(to_open_unit(r[2], r[3]));
  }
}

}  // namespace

std::string_view to_string(Purpose purpose) noexcept {
  switch (purpose) {
    case Purpose::initial: return "initial";
    case Purpose::brownian: return "brownian";
    case Purpose::reference: return "reference";
  }
  return "unknown";
}

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double inverse_normal_cdf(double p) noexcept {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

void uniforms(const NoisePlan& plan, Channel channel, std::uint64_t particle, std::uint64_t step,
              std::span<double> out) {
  fill(plan, channel, particle, step, out, [](double u) { return u; });
}

void standard_normals(const NoisePlan& plan, Channel channel, std::uint64_t particle,
                      std::uint64_t step, std::span<double> out) {
  fill(plan, channel, particle, step, out, inverse_normal_cdf);
}

std::vector<double> gaussian_increment(const NoisePlan& plan, std::uint64_t particle,
                                       std::uint64_t step) {
  std::vector<double> xi(plan.dimension);
  standard_normals(plan, Channel::increments, particle, step, xi);
  return xi;
}

InitialDistribution InitialDistribution::gaussian(std::vector<double> mean,
                                                  std::vector<double> variance) {
  InitialDistribution d{Kind::gaussian, std::move(mean), std::move(variance)};
  d.validate();
  return d;
}

InitialDistribution InitialDistribution::uniform(std::vector<double> low,
                                                 std::vector<double> high) {
  InitialDistribution d{Kind::uniform, std::move(low), std::move(high)};
  d.validate();
  return d;
}

void InitialDistribution::validate() const {
  if (first.empty() || first.size() != second.size()) {
    throw ConfigError("initial distribution: parameter vectors must be non-empty and equal length");
  }
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (!std::isfinite(first[k]) || !std::isfinite(second[k])) {
      throw ConfigError("initial distribution: parameters must be finite");
    }
    if (kind == Kind::gaussian && second[k] < 0.0) {
      throw ConfigError("initial distribution: variance must be non-negative");
    }
    if (kind == Kind::uniform && !(first[k] <= second[k])) {
      throw ConfigError("initial distribution: uniform box needs low <= high");
    }
  }
}

Matrix sample_rows(const NoisePlan& plan, const InitialDistribution& distribution,
                   std::uint64_t first_row, std::size_t count, std::uint64_t stream) {
  if (count == 0) throw InputError("sample_initial: count must be positive");
  distribution.validate();
  const std::size_t d = distribution.dimension();
  if (plan.dimension != d) {
    throw InputError("sample_initial: plan dimension " + std::to_string(plan.dimension) +
                     " does not match distribution dimension " + std::to_string(d));
  }
  Matrix out(count, d);
  for (std::size_t i = 0; i < count; ++i) {
    auto row = out.row(i);
    if (distribution.kind == InitialDistribution::Kind::gaussian) {
      standard_normals(plan, Channel::data, first_row + i, stream, row);
      for (std::size_t k = 0; k < d; ++k) {
        row[k] = distribution.first[k] + std::sqrt(distribution.second[k]) * row[k];
      }
    } else {
      uniforms(plan, Channel::data, first_row + i, stream, row);
      for (std::size_t k = 0; k < d; ++k) {
        const double lo = distribution.first[k];
        const double hi = distribution.second[k];
        row[k] = std::min(hi, lo + (hi - lo) * row[k]);
      }
    }
  }
  return out;
}

Matrix sample_initial(const NoisePlan& plan, const InitialDistribution& distribution,
                      std::size_t count) {
  return sample_rows(plan, distribution, 0, count, 0);
}

}  // namespace cbo
