#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "dmimo/linalg.hpp"
#include "dmimo/rng.hpp"
#include "dmimo/tabular.hpp"
#include "dmimo/topology.hpp"

namespace dmimo {

struct FadingParams {
  double gamma = 3.8;          // path-loss exponent
  double sigma_shad_db = 8.0;  // shadowing standard deviation, dB
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gamma > 0.0)) {
      throw std::invalid_argument("fading: gamma must be positive");
    }
    if (!(sigma_shad_db >= 0.0)) {
      throw std::invalid_argument("fading: sigma_shad_db must be >= 0");
    }
  }
};

/// M x K large-scale coefficients (path loss x shadowing, linear power
/// scale). Rows follow the RRH order of the generating topology, so the
/// full-resolution block comes first.
struct LargeScaleMatrix {
  RealMatrix beta;
  std::size_t m_full = 0;

  std::size_t m_total() const { return beta.rows(); }
  std::size_t m_low() const { return beta.rows() - m_full; }
  std::size_t k_users() const { return beta.cols(); }
};

namespace detail {
constexpr std::uint64_t kSaltShadowing = 0x5348414457ULL;
constexpr std::uint64_t kSaltUserShadowing = 0x5553484457ULL;
constexpr std::uint64_t kSaltSmallScale = 0x534d414c4cULL;
// Row kinds for per-row shadowing substreams; keyed by (class, index within
// class) so a row keeps its draw when the low-resolution block grows.
constexpr std::uint64_t kRowFull = 0;
constexpr std::uint64_t kRowLow = 1;
}  // namespace detail

/// beta_mk = z_mk * d_mk^-gamma with 10*log10(z) ~ N(0, sigma_shad_db^2),
/// drawn independently per (RRH, user) pair.
inline LargeScaleMatrix large_scale_fading(const DistanceMatrix& distances,
                                           const FadingParams& params) {
  params.validate();
  const std::size_t m_total = distances.d_km.rows();
  const std::size_t k_users = distances.d_km.cols();
  LargeScaleMatrix out;
  out.m_full = distances.m_full;
  out.beta = RealMatrix(m_total, k_users);
  for (std::size_t m = 0; m < m_total; ++m) {
    const bool full = m < distances.m_full;
    auto rng = make_engine(params.seed, detail::kSaltShadowing,
                           full ? detail::kRowFull : detail::kRowLow,
                           full ? m : m - distances.m_full);
    std::normal_distribution<double> shadow_db(0.0,
                                               params.sigma_shad_db > 0.0
                                                   ? params.sigma_shad_db
                                                   : 1.0);
    for (std::size_t k = 0; k < k_users; ++k) {
      const double z_db = params.sigma_shad_db > 0.0 ? shadow_db(rng) : 0.0;
      const double d = distances.d_km(m, k);
      if (!(d > 0.0)) {
        throw std::invalid_argument(
            "large_scale_fading: zero RRH-user distance, invalid geometry");
      }
      out.beta(m, k) = std::pow(10.0, z_db / 10.0) * std::pow(d, -params.gamma);
    }
  }
  return out;
}

/// Collocated variant: all RRHs share one site, so the shadowing draw is per
/// user and beta collapses to one value per user. Requires a distance matrix
/// with identical rows (the output of collocate()).
inline std::vector<double> large_scale_fading_colocated(
    const DistanceMatrix& distances, const FadingParams& params) {
  params.validate();
  const std::size_t m_total = distances.d_km.rows();
  const std::size_t k_users = distances.d_km.cols();
  for (std::size_t m = 1; m < m_total; ++m) {
    for (std::size_t k = 0; k < k_users; ++k) {
      if (distances.d_km(m, k) != distances.d_km(0, k)) {
        throw std::invalid_argument(
            "large_scale_fading_colocated: distance rows differ, topology is "
            "not collocated");
      }
    }
  }
  auto rng = make_engine(params.seed, detail::kSaltUserShadowing);
  std::normal_distribution<double> shadow_db(
      0.0, params.sigma_shad_db > 0.0 ? params.sigma_shad_db : 1.0);
  std::vector<double> beta(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    const double z_db = params.sigma_shad_db > 0.0 ? shadow_db(rng) : 0.0;
    const double d = distances.d_km(0, k);
    if (!(d > 0.0)) {
      throw std::invalid_argument(
          "large_scale_fading_colocated: zero RRH-user distance");
    }
    beta[k] = std::pow(10.0, z_db / 10.0) * std::pow(d, -params.gamma);
  }
  return beta;
}

/// i.i.d. CN(0,1) fast-fading draw, deterministic in the seed.
inline ComplexMatrix draw_small_scale(std::size_t m_rows, std::size_t k_cols,
                                      std::uint64_t seed) {
  if (m_rows == 0 || k_cols == 0) {
    throw std::invalid_argument("draw_small_scale: dimensions must be >= 1");
  }
  ComplexMatrix h(m_rows, k_cols);
  auto rng = make_engine(seed, detail::kSaltSmallScale);
  fill_complex_gaussian(h.data(), 1.0, rng);
  return h;
}

/// One channel draw g = h .* sqrt(beta), split at the ADC-class partition.
struct ChannelRealization {
  ComplexMatrix g_full;
  ComplexMatrix g_low;
  LargeScaleMatrix beta;
};

inline ChannelRealization compose_channel(const LargeScaleMatrix& beta,
                                          const ComplexMatrix& h) {
  if (h.rows() != beta.beta.rows() || h.cols() != beta.beta.cols()) {
    throw std::invalid_argument("compose_channel: shape mismatch");
  }
  ChannelRealization out;
  out.beta = beta;
  out.g_full = ComplexMatrix(beta.m_full, beta.k_users());
  out.g_low = ComplexMatrix(beta.m_low(), beta.k_users());
  for (std::size_t m = 0; m < beta.m_total(); ++m) {
    for (std::size_t k = 0; k < beta.k_users(); ++k) {
      const auto g = h(m, k) * std::sqrt(beta.beta(m, k));
      if (m < beta.m_full) {
        out.g_full(m, k) = g;
      } else {
        out.g_low(m - beta.m_full, k) = g;
      }
    }
  }
  return out;
}

inline void write_large_scale(std::ostream& os, const LargeScaleMatrix& m,
                              const FadingParams& params) {
  os << "# m_full " << m.m_full << " m_low " << m.m_low() << " k "
     << m.k_users() << " gamma " << format_full(params.gamma)
     << " sigma_shad_db " << format_full(params.sigma_shad_db) << " seed "
     << params.seed << "\n";
  for (std::size_t r = 0; r < m.beta.rows(); ++r) {
    for (std::size_t c = 0; c < m.beta.cols(); ++c) {
      if (c) os << ' ';
      os << format_sci(m.beta(r, c));
    }
    os << "\n";
  }
}

inline std::pair<LargeScaleMatrix, FadingParams> read_large_scale(
    std::istream& is) {
  const auto meta = split_tokens(expect_line(is, "large-scale header"));
  if (meta.size() != 13 || meta[0] != "#" || meta[1] != "m_full" ||
      meta[3] != "m_low" || meta[5] != "k" || meta[7] != "gamma" ||
      meta[9] != "sigma_shad_db" || meta[11] != "seed") {
    throw std::runtime_error("large-scale matrix: malformed header");
  }
  LargeScaleMatrix out;
  out.m_full = static_cast<std::size_t>(parse_uint(meta[2]));
  const std::size_t m_low = static_cast<std::size_t>(parse_uint(meta[4]));
  const std::size_t k = static_cast<std::size_t>(parse_uint(meta[6]));
  FadingParams params;
  params.gamma = parse_double(meta[8]);
  params.sigma_shad_db = parse_double(meta[10]);
  params.seed = parse_uint(meta[12]);
  out.beta = RealMatrix(out.m_full + m_low, k);
  for (std::size_t r = 0; r < out.beta.rows(); ++r) {
    const auto tok = split_tokens(expect_line(is, "large-scale matrix row"));
    if (tok.size() != k) {
      throw std::runtime_error("large-scale matrix: wrong column count");
    }
    for (std::size_t c = 0; c < k; ++c) out.beta(r, c) = parse_double(tok[c]);
  }
  return {out, params};
}

}  // namespace dmimo
