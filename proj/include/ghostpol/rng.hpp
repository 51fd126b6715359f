#pragma once

#include <cstdint>

namespace ghostpol {

/// SplitMix64 generator (Steele, Lea & Flood). Used as a keyed, splittable
/// source: every (seed, stream) pair gets an independent sequence, so the
/// draws of one sweep point never depend on how many draws another point made.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGamma);
    return mix(z);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of child stream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64::mix(SplitMix64::mix(seed) ^ SplitMix64::mix(index * SplitMix64::kGamma + 0x5851f42d4c957f2dULL));
}

/// Poisson variate with the given mean. Inversion for mean < 10, otherwise
/// Hormann's transformed rejection (PTRS). Only uses <cmath> elementary
/// functions, so results do not depend on the standard library vendor.
std::uint64_t sample_poisson(SplitMix64& rng, double mean);

/// log(k!) without relying on the thread-unsafe lgamma.
double log_factorial(std::uint64_t k);

}  // namespace ghostpol
