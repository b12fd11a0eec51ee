#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>

namespace dmimo {

using RandomEngine = std::mt19937_64;

// splitmix64 finalizer, decorrelates adjacent seed values.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) { return mix64(seed); }

/// Seed of an independent substream identified by (seed, salt, salt, ...).
/// Every consumer of randomness derives its own substream so that results do
/// not depend on the order in which components draw.
template <typename... Salts>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt,
                                    Salts... rest) {
  return derive_seed(mix64(seed ^ mix64(salt)), rest...);
}

template <typename... Salts>
RandomEngine make_engine(std::uint64_t seed, Salts... salts) {
  return RandomEngine(derive_seed(seed, salts...));
}

/// Fills `out` with i.i.d. circularly-symmetric complex Gaussian samples of
/// the given total variance (real and imaginary parts each carry half).
inline void fill_complex_gaussian(std::span<std::complex<double>> out,
                                  double variance, RandomEngine& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (auto& v : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    v = {re, im};
  }
}

inline std::complex<double> complex_gaussian(double variance,
                                             RandomEngine& rng) {
  std::complex<double> v;
  fill_complex_gaussian({&v, 1}, variance, rng);
  return v;
}

}  // namespace dmimo
