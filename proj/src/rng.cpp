#include "ghostpol/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "ghostpol/errors.hpp"

namespace ghostpol {

namespace {

constexpr std::uint64_t kTableSize = 16;

double table_log_factorial(std::uint64_t k) {
  static const std::array<double, kTableSize> table = [] {
    std::array<double, kTableSize> t{};
    double acc = 0.0;
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      acc += std::log(static_cast<double>(i));
      t[i] = acc;
    }
    return t;
  }();
  return table[k];
}

std::uint64_t poisson_inversion(SplitMix64& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = rng.uniform();
  std::uint64_t k = 0;
  while (prod > limit) {
    prod *= rng.uniform();
    ++k;
  }
  return k;
}

std::uint64_t poisson_ptrs(SplitMix64& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const auto ki = static_cast<std::uint64_t>(k);
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_factorial(ki))
      return ki;
  }
}

}  // namespace

double log_factorial(std::uint64_t k) {
  if (k < kTableSize) return table_log_factorial(k);
  // Stirling series for log Gamma(n + 1), accurate to ~1e-15 for n >= 16.
  const double n = static_cast<double>(k);
  const double inv = 1.0 / n;
  const double inv2 = inv * inv;
  return n * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi * n) +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

std::uint64_t sample_poisson(SplitMix64& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw DomainError("Poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(rng, mean);
  return poisson_ptrs(rng, mean);
}

}  // namespace ghostpol
