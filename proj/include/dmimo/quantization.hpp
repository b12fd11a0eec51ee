#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "dmimo/linalg.hpp"
#include "dmimo/rng.hpp"
#include "dmimo/tabular.hpp"

namespace dmimo {

namespace detail {

inline double normal_pdf(double x) {
  if (std::isinf(x)) return 0.0;
  constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double normal_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  constexpr double kInvSqrt2 = 0.7071067811865475244;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

// x * pdf(x) with the limit 0 at +/-inf.
inline double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * normal_pdf(x); }

inline double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// E[(X - y)^2 * 1{a < X <= b}] for X ~ N(0,1), closed form.
inline double cell_distortion(double a, double b, double y) {
  const double prob = normal_cdf(b) - normal_cdf(a);
  return (1.0 + y * y) * prob - (x_pdf(b) - x_pdf(a)) -
         2.0 * y * (normal_pdf(a) - normal_pdf(b));
}

/// Normalized MSE of the 2^bits-level scalar MMSE quantizer of N(0,1),
/// obtained by alternating centroid/boundary updates from a quantile start
/// until the distortion change drops below 1e-10.
inline double lloyd_max_distortion(int bits) {
  const std::size_t n = std::size_t{1} << bits;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> level(n), bound(n + 1);
  bound.front() = -kInf;
  bound.back() = kInf;
  // Companding start: the MSE-optimal point density follows pdf^(1/3), i.e.
  // a variance-3 Gaussian. Plain pdf quantiles leave the iteration thousands
  // of sweeps from stationarity at B >= 8; this start polishes in a few.
  const double spread = std::sqrt(3.0);
  for (std::size_t j = 0; j < n; ++j) {
    level[j] = spread * normal_quantile((static_cast<double>(j) + 0.5) /
                                        static_cast<double>(n));
  }

  constexpr int kMaxIterations = 10000;
  constexpr double kTolerance = 1e-10;
  double prev = kInf;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (std::size_t j = 1; j < n; ++j) {
      bound[j] = 0.5 * (level[j - 1] + level[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double prob = normal_cdf(bound[j + 1]) - normal_cdf(bound[j]);
      if (prob > 0.0) {
        level[j] = (normal_pdf(bound[j]) - normal_pdf(bound[j + 1])) / prob;
      }
    }
    NeumaierSum d;
    for (std::size_t j = 0; j < n; ++j) {
      d.add(cell_distortion(bound[j], bound[j + 1], level[j]));
    }
    const double dist = d.value();
    if (std::abs(prev - dist) < kTolerance) return dist;
    prev = dist;
  }
  throw std::runtime_error("lloyd_max_distortion: no convergence within 10000 iterations");
}

}  // namespace detail

/// Linear gain of the additive-quantization-noise model for a B-bit MMSE
/// scalar quantizer of a Gaussian input: alpha = 1 - D(B). Results are cached;
/// safe for concurrent callers.
inline double lloyd_max_alpha(int bits) {
  if (bits < 1 || bits > 16) {
    throw std::invalid_argument("lloyd_max_alpha: bits must lie in [1, 16]");
  }
  static std::mutex mutex;
  static std::array<std::optional<double>, 17> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(bits)];
  if (!slot) slot = 1.0 - detail::lloyd_max_distortion(bits);
  return *slot;
}

/// ADC resolution of one RRH class: B bits, or full resolution (alpha == 1).
struct QuantizerSpec {
  std::optional<int> bits;  // nullopt = full resolution
  double alpha = 1.0;

  static QuantizerSpec full_resolution() { return {std::nullopt, 1.0}; }
  static QuantizerSpec from_bits(int b) { return {b, lloyd_max_alpha(b)}; }
  bool is_full_res() const { return !bits.has_value(); }
};

/// Diagonal covariance of the quantization-noise vector for one channel
/// realization.
struct QuantNoiseCov {
  std::vector<double> diag;
};

/// Entry m': alpha*(1-alpha) * (1 + rho * sum_i |g_hat^H_{m'i} g_{m'i}|),
/// the diagonal of alpha*(1-alpha)*diag(rho*G_l*G_hat_l^H + I).
inline QuantNoiseCov quant_noise_cov(const ComplexMatrix& g_low,
                                     const ComplexMatrix& g_hat_low,
                                     double alpha, double rho) {
  if (g_low.rows() != g_hat_low.rows() || g_low.cols() != g_hat_low.cols()) {
    throw std::invalid_argument("quant_noise_cov: shape mismatch");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw std::invalid_argument("quant_noise_cov: alpha must lie in (0, 1]");
  }
  if (!(rho >= 0.0)) {
    throw std::invalid_argument("quant_noise_cov: rho must be >= 0");
  }
  QuantNoiseCov cov;
  cov.diag.resize(g_low.rows());
  for (std::size_t m = 0; m < g_low.rows(); ++m) {
    NeumaierSum s;
    for (std::size_t i = 0; i < g_low.cols(); ++i) {
      s.add(std::abs(std::conj(g_hat_low(m, i)) * g_low(m, i)));
    }
    cov.diag[m] = alpha * (1.0 - alpha) * (1.0 + rho * s.value());
  }
  return cov;
}

/// One draw of the quantization-noise vector: independent circularly
/// symmetric complex Gaussians with the covariance's per-entry variances.
inline std::vector<std::complex<double>> draw_quant_noise(
    const QuantNoiseCov& cov, std::uint64_t seed) {
  constexpr std::uint64_t kSaltQuantNoise = 0x514e4f49ULL;
  auto rng = make_engine(seed, kSaltQuantNoise);
  std::vector<std::complex<double>> w(cov.diag.size());
  for (std::size_t m = 0; m < w.size(); ++m) {
    w[m] = complex_gaussian(cov.diag[m], rng);
  }
  return w;
}

/// AQNM action on a received vector: alpha * y + w_q. Full resolution
/// (alpha == 1) is a bit-exact passthrough that consumes no randomness.
inline std::vector<std::complex<double>> apply_aqnm(
    std::span<const std::complex<double>> y_low, const QuantNoiseCov& cov,
    double alpha, std::uint64_t seed) {
  if (y_low.size() != cov.diag.size()) {
    throw std::invalid_argument("apply_aqnm: length mismatch");
  }
  if (alpha == 1.0) return {y_low.begin(), y_low.end()};
  auto out = draw_quant_noise(cov, seed);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] += alpha * y_low[m];
  }
  return out;
}

/// Regression table of the AQNM gain, 12 significant digits.
inline void write_alpha_table(std::ostream& os, int bits_min = 1,
                              int bits_max = 12) {
  os << "B alpha\n";
  for (int b = bits_min; b <= bits_max; ++b) {
    os << b << ' ' << format_sig(lloyd_max_alpha(b), 12) << "\n";
  }
}

}  // namespace dmimo
