#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/linalg.hpp"
#include "dmimo/tabular.hpp"

namespace dmimo {

struct SystemConfig {
  double rho = 10.0;     // transmit SNR, linear
  double alpha = 1.0;    // AQNM gain of the low-resolution class
  std::size_t m_full = 0;
  std::size_t m_low = 0;
  std::size_t k_users = 0;
  double bandwidth_hz = 10.0e6;

  void validate() const {
    if (!(rho > 0.0)) {
      throw std::invalid_argument("system: rho must be positive");
    }
    if (!(alpha > 0.0) || alpha > 1.0) {
      throw std::invalid_argument("system: alpha must lie in (0, 1]");
    }
    if (m_full + m_low == 0) {
      throw std::invalid_argument("system: at least one RRH required");
    }
    if (k_users == 0) {
      throw std::invalid_argument("system: at least one user required");
    }
    if (!(bandwidth_hz > 0.0)) {
      throw std::invalid_argument("system: bandwidth must be positive");
    }
  }

  void check_against(const LargeScaleMatrix& beta) const {
    validate();
    if (beta.m_full != m_full || beta.m_low() != m_low ||
        beta.k_users() != k_users) {
      throw std::invalid_argument(
          "system: partition/user count does not match the large-scale matrix");
    }
  }
};

/// Second moments of the signal decomposition for one user, in the units of
/// the rate expression's numerator and denominator: the desired-signal power
/// |FS+LS|^2 over the sum of estimation-uncertainty (FU/LU), multi-user
/// interference (FI/LI), quantization-noise (QN) and AWGN (N) powers.
struct SinrBreakdown {
  double fs_ls_power = 0.0;
  double fu_power = 0.0;
  double lu_power = 0.0;
  double fi_power = 0.0;
  double li_power = 0.0;
  double qn_power = 0.0;
  double n_power = 0.0;

  double noise_interference_power() const {
    return fu_power + lu_power + fi_power + li_power + qn_power + n_power;
  }
  double sinr() const { return fs_ls_power / noise_interference_power(); }
};

struct SEReportMeta {
  std::optional<int> bits;           // resolution behind alpha, when known
  std::vector<std::uint64_t> seeds;  // seed lineage of the instance
  std::string label;
};

struct SEReport {
  std::vector<double> per_user_rate_bps_hz;
  std::vector<double> per_user_throughput_bps;
  double sum_rate_bps_hz = 0.0;
  SystemConfig config;
  SEReportMeta meta;
};

namespace detail {

struct UserSums {
  double sf = 0.0;       // sum over F-RRHs of beta_mk
  double sl = 0.0;       // sum over L-RRHs of beta_m'k
  double sf_sq = 0.0;    // sum over F-RRHs of beta_mk^2
  double sl_sq = 0.0;    // sum over L-RRHs of beta_m'k^2
  double f_all = 0.0;    // sum_f sum_{i=1..K} beta_mk beta_mi
  double f_cross = 0.0;  // sum_f sum_{i != k} beta_mk beta_mi
  double l_cross = 0.0;  // sum_l sum_{i != k} beta_m'k beta_m'i
};

inline std::vector<double> row_totals(const RealMatrix& beta) {
  std::vector<double> totals(beta.rows());
  for (std::size_t m = 0; m < beta.rows(); ++m) {
    totals[m] = compensated_total(beta.row(m));
  }
  return totals;
}

inline UserSums user_sums(const LargeScaleMatrix& beta,
                          const std::vector<double>& totals,
                          std::size_t user_k) {
  UserSums s;
  NeumaierSum sf, sl, sf_sq, sl_sq, f_all, f_cross, l_cross;
  for (std::size_t m = 0; m < beta.m_total(); ++m) {
    const double b = beta.beta(m, user_k);
    const double others = totals[m] - b;
    if (m < beta.m_full) {
      sf.add(b);
      sf_sq.add(b * b);
      f_all.add(b * totals[m]);
      f_cross.add(b * others);
    } else {
      sl.add(b);
      sl_sq.add(b * b);
      l_cross.add(b * others);
    }
  }
  s.sf = sf.value();
  s.sl = sl.value();
  s.sf_sq = sf_sq.value();
  s.sl_sq = sl_sq.value();
  s.f_all = f_all.value();
  s.f_cross = f_cross.value();
  s.l_cross = l_cross.value();
  return s;
}

inline SEReport report_from_sinrs(const std::vector<double>& sinr,
                                  const SystemConfig& config) {
  SEReport r;
  r.config = config;
  r.per_user_rate_bps_hz.reserve(sinr.size());
  r.per_user_throughput_bps.reserve(sinr.size());
  NeumaierSum sum;
  for (double s : sinr) {
    const double rate = std::log2(1.0 + s);
    r.per_user_rate_bps_hz.push_back(rate);
    r.per_user_throughput_bps.push_back(rate * config.bandwidth_hz);
    sum.add(rate);
  }
  r.sum_rate_bps_hz = sum.value();
  return r;
}

}  // namespace detail

/// Closed-form second moments of every decomposition term for one user.
inline SinrBreakdown sinr_components(const LargeScaleMatrix& beta,
                                     const SystemConfig& config,
                                     std::size_t user_k) {
  config.check_against(beta);
  if (user_k >= config.k_users) {
    throw std::invalid_argument("sinr_components: user index out of range");
  }
  const auto totals = detail::row_totals(beta.beta);
  const auto s = detail::user_sums(beta, totals, user_k);
  const double a = config.alpha;
  const double rho = config.rho;

  SinrBreakdown b;
  const double amp = s.sf + a * s.sl;
  b.fs_ls_power = rho * amp * amp;
  b.fu_power = rho * s.sf_sq;
  b.lu_power = a * a * rho * s.sl_sq;
  b.fi_power = rho * s.f_cross;
  b.li_power = a * a * rho * s.l_cross;
  b.qn_power = a * (1.0 - a) * (s.sl + rho * s.l_cross + 2.0 * rho * s.sl_sq);
  b.n_power = s.sf + a * a * s.sl;
  return b;
}

/// Worst-case achievable SE lower bound of the mixed-resolution network,
/// evaluated directly from the large-scale coefficients.
inline SEReport se_mixed(const LargeScaleMatrix& beta,
                            const SystemConfig& config) {
  config.check_against(beta);
  const auto totals = detail::row_totals(beta.beta);
  const double a = config.alpha;
  std::vector<double> sinr(config.k_users);
  for (std::size_t k = 0; k < config.k_users; ++k) {
    const auto s = detail::user_sums(beta, totals, k);
    const double num =
        s.sf * s.sf + 2.0 * a * s.sf * s.sl + a * a * s.sl * s.sl;
    const double den = s.f_all + (2.0 * a - a * a) * s.sl_sq +
                       a * s.l_cross + (s.sf + a * s.sl) / config.rho;
    sinr[k] = num / den;
  }
  return detail::report_from_sinrs(sinr, config);
}

/// All-low-resolution special case (no full-resolution RRHs).
inline SEReport se_all_low(const LargeScaleMatrix& beta,
                           const SystemConfig& config) {
  config.check_against(beta);
  if (config.m_full != 0) {
    throw std::invalid_argument("se_all_low: requires m_full == 0");
  }
  const auto totals = detail::row_totals(beta.beta);
  const double a = config.alpha;
  std::vector<double> sinr(config.k_users);
  for (std::size_t k = 0; k < config.k_users; ++k) {
    NeumaierSum s_acc, s_sq_acc, cross_acc;
    for (std::size_t m = 0; m < beta.m_total(); ++m) {
      const double b = beta.beta(m, k);
      s_acc.add(b);
      s_sq_acc.add(b * b);
      cross_acc.add(b * (totals[m] - b));
    }
    const double s = s_acc.value();
    const double s_sq = s_sq_acc.value();
    const double j = s_sq + cross_acc.value() + s / config.rho;
    sinr[k] = a * s * s / (j + (1.0 - a) * s_sq);
  }
  return detail::report_from_sinrs(sinr, config);
}

/// All-full-resolution expression; alpha-free, the partition is ignored.
inline SEReport se_all_full(const LargeScaleMatrix& beta,
                            const SystemConfig& config) {
  config.check_against(beta);
  const auto totals = detail::row_totals(beta.beta);
  std::vector<double> sinr(config.k_users);
  for (std::size_t k = 0; k < config.k_users; ++k) {
    NeumaierSum s_acc, s_sq_acc, cross_acc;
    for (std::size_t m = 0; m < beta.m_total(); ++m) {
      const double b = beta.beta(m, k);
      s_acc.add(b);
      s_sq_acc.add(b * b);
      cross_acc.add(b * (totals[m] - b));
    }
    const double s = s_acc.value();
    const double j = s_sq_acc.value() + cross_acc.value() + s / config.rho;
    sinr[k] = s * s / j;
  }
  return detail::report_from_sinrs(sinr, config);
}

/// Centralized baseline: every RRH sees the same large-scale coefficient
/// beta_k per user; kappa is the full-resolution fraction M_f / M.
inline SEReport se_colocated(const std::vector<double>& beta_users,
                             double kappa, const SystemConfig& config,
                             std::size_t m_total) {
  config.validate();
  if (kappa < 0.0 || kappa > 1.0) {
    throw std::invalid_argument("se_colocated: kappa must lie in [0, 1]");
  }
  if (m_total == 0) {
    throw std::invalid_argument("se_colocated: m_total must be >= 1");
  }
  if (beta_users.size() != config.k_users) {
    throw std::invalid_argument("se_colocated: beta size mismatch");
  }
  for (double b : beta_users) {
    if (!(b > 0.0)) {
      throw std::invalid_argument("se_colocated: beta must be positive");
    }
  }
  const double a = config.alpha;
  const double gain = kappa + a * (1.0 - kappa);
  const double self = (kappa + (1.0 - kappa) * (2.0 * a - a * a)) / gain;
  const double total = compensated_total(beta_users);
  std::vector<double> sinr(beta_users.size());
  for (std::size_t k = 0; k < beta_users.size(); ++k) {
    const double b = beta_users[k];
    const double interference = total - b;
    sinr[k] = static_cast<double>(m_total) * gain * b /
              (1.0 / config.rho + interference + self * b);
  }
  return detail::report_from_sinrs(sinr, config);
}

inline void write_se_report(std::ostream& os, const SEReport& r) {
  os << "# m_full " << r.config.m_full << " m_low " << r.config.m_low << " k "
     << r.config.k_users << " bits "
     << (r.meta.bits ? std::to_string(*r.meta.bits) : std::string("full"))
     << " alpha " << format_full(r.config.alpha) << " rho "
     << format_full(r.config.rho) << " bandwidth_hz "
     << format_full(r.config.bandwidth_hz) << " seeds";
  if (r.meta.seeds.empty()) {
    os << " none";
  } else {
    for (auto s : r.meta.seeds) os << ' ' << s;
  }
  os << "\n";
  os << "user_id rate_bps_hz throughput_bps\n";
  for (std::size_t k = 0; k < r.per_user_rate_bps_hz.size(); ++k) {
    os << k << ' ' << format_full(r.per_user_rate_bps_hz[k]) << ' '
       << format_full(r.per_user_throughput_bps[k]) << "\n";
  }
}

}  // namespace dmimo
