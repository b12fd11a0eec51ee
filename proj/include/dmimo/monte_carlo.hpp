#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/closed_form.hpp"
#include "dmimo/linalg.hpp"
#include "dmimo/quantization.hpp"
#include "dmimo/rng.hpp"
#include "dmimo/tabular.hpp"

namespace dmimo {

/// Families of the received-signal decomposition after combining: desired
/// signal (FS+LS), estimation uncertainty (FU/LU), multi-user interference
/// (FI/LI), quantization noise (QN) and AWGN (N).
enum class Term { FsLs, Fu, Lu, Fi, Li, Qn, N };

inline const char* term_name(Term t) {
  switch (t) {
    case Term::FsLs: return "FS_LS";
    case Term::Fu: return "FU";
    case Term::Lu: return "LU";
    case Term::Fi: return "FI";
    case Term::Li: return "LI";
    case Term::Qn: return "QN";
    case Term::N: return "N";
  }
  return "?";
}

constexpr std::array<Term, 7> kAllTerms = {Term::FsLs, Term::Fu, Term::Lu,
                                           Term::Fi,   Term::Li, Term::Qn,
                                           Term::N};

/// One draw of the combined receive chain, decomposed per user. Every term is
/// evaluated from its defining expression, not by subtracting from the
/// combiner output; `mrc_output` keeps the directly computed output so the
/// decomposition identity can be checked.
struct TrialSample {
  std::vector<std::complex<double>> fs_ls;  // deterministic given beta
  std::vector<std::complex<double>> fu;
  std::vector<std::complex<double>> lu;
  std::vector<std::complex<double>> fi;  // includes the interfering symbols
  std::vector<std::complex<double>> li;
  std::vector<std::complex<double>> qn;
  std::vector<std::complex<double>> n;
  std::vector<std::complex<double>> symbols;
  std::vector<std::complex<double>> mrc_output;

  std::complex<double> term(Term t, std::size_t k) const {
    switch (t) {
      case Term::FsLs: return fs_ls[k];
      case Term::Fu: return fu[k];
      case Term::Lu: return lu[k];
      case Term::Fi: return fi[k];
      case Term::Li: return li[k];
      case Term::Qn: return qn[k];
      case Term::N: return n[k];
    }
    return {};
  }

  /// Sum of everything but the desired signal, as it enters the combiner
  /// output for user k.
  std::complex<double> npi(std::size_t k) const {
    return (fu[k] + lu[k]) * symbols[k] + fi[k] + li[k] + qn[k] + n[k];
  }

  /// Reassembled combiner output; equals mrc_output up to rounding.
  std::complex<double> reconstructed(std::size_t k) const {
    return (fs_ls[k] + fu[k] + lu[k]) * symbols[k] + fi[k] + li[k] + qn[k] +
           n[k];
  }
};

namespace detail {
constexpr std::uint64_t kSaltTrialChannel = 0x74634841ULL;
constexpr std::uint64_t kSaltTrialSymbols = 0x74535953ULL;
constexpr std::uint64_t kSaltTrialNoise = 0x744e4f49ULL;
constexpr std::uint64_t kSaltTrialQuant = 0x74515541ULL;
constexpr std::uint64_t kSaltTrialIndex = 0x7452554eULL;
}  // namespace detail

/// Simulates one transmission: unit-modulus symbols, fresh fast fading,
/// AWGN at every RRH, AQNM gain and quantization noise on the low-resolution
/// block, maximum-ratio combining with perfect channel knowledge.
inline TrialSample simulate_mrc_trial(const LargeScaleMatrix& beta,
                                      const SystemConfig& config,
                                      std::uint64_t trial_seed) {
  config.check_against(beta);
  const std::size_t m_f = config.m_full;
  const std::size_t m_l = config.m_low;
  const std::size_t k_users = config.k_users;
  const double a = config.alpha;
  const double sqrt_rho = std::sqrt(config.rho);

  const auto h = draw_small_scale(m_f + m_l, k_users,
                                  derive_seed(trial_seed, detail::kSaltTrialChannel));
  const auto chan = compose_channel(beta, h);

  TrialSample s;
  s.symbols.resize(k_users);
  {
    auto rng = make_engine(trial_seed, detail::kSaltTrialSymbols);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (auto& x : s.symbols) x = std::polar(1.0, phase(rng));
  }

  std::vector<std::complex<double>> w_f(m_f), w_l(m_l);
  {
    auto rng = make_engine(trial_seed, detail::kSaltTrialNoise);
    fill_complex_gaussian(w_f, 1.0, rng);
    fill_complex_gaussian(w_l, 1.0, rng);
  }
  const auto cov = quant_noise_cov(chan.g_low, chan.g_low, a, config.rho);
  const auto w_q = (a < 1.0)
                       ? draw_quant_noise(cov, derive_seed(trial_seed,
                                                           detail::kSaltTrialQuant))
                       : std::vector<std::complex<double>>(m_l);

  // received vectors, for the direct combiner output
  std::vector<std::complex<double>> y_f(m_f), y_l_quant(m_l);
  for (std::size_t m = 0; m < m_f; ++m) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < k_users; ++i) {
      acc += chan.g_full(m, i) * s.symbols[i];
    }
    y_f[m] = sqrt_rho * acc + w_f[m];
  }
  for (std::size_t m = 0; m < m_l; ++m) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < k_users; ++i) {
      acc += chan.g_low(m, i) * s.symbols[i];
    }
    y_l_quant[m] = a * (sqrt_rho * acc + w_l[m]) + w_q[m];
  }

  s.fs_ls.resize(k_users);
  s.fu.resize(k_users);
  s.lu.resize(k_users);
  s.fi.resize(k_users);
  s.li.resize(k_users);
  s.qn.resize(k_users);
  s.n.resize(k_users);
  s.mrc_output.resize(k_users);

  for (std::size_t k = 0; k < k_users; ++k) {
    NeumaierSum beta_f, beta_l, est_f, est_l;
    std::complex<double> noise_f = 0.0, noise_l = 0.0, qn = 0.0;
    std::complex<double> out_f = 0.0, out_l = 0.0;
    for (std::size_t m = 0; m < m_f; ++m) {
      const auto g_hat = std::conj(chan.g_full(m, k));
      beta_f.add(beta.beta(m, k));
      est_f.add((g_hat * chan.g_full(m, k)).real());
      noise_f += g_hat * w_f[m];
      out_f += g_hat * y_f[m];
    }
    for (std::size_t m = 0; m < m_l; ++m) {
      const auto g_hat = std::conj(chan.g_low(m, k));
      beta_l.add(beta.beta(m_f + m, k));
      est_l.add((g_hat * chan.g_low(m, k)).real());
      noise_l += g_hat * w_l[m];
      qn += g_hat * w_q[m];
      out_l += g_hat * y_l_quant[m];
    }
    std::complex<double> interf_f = 0.0, interf_l = 0.0;
    for (std::size_t i = 0; i < k_users; ++i) {
      if (i == k) continue;
      std::complex<double> dot_f = 0.0, dot_l = 0.0;
      for (std::size_t m = 0; m < m_f; ++m) {
        dot_f += std::conj(chan.g_full(m, k)) * chan.g_full(m, i);
      }
      for (std::size_t m = 0; m < m_l; ++m) {
        dot_l += std::conj(chan.g_low(m, k)) * chan.g_low(m, i);
      }
      interf_f += dot_f * s.symbols[i];
      interf_l += dot_l * s.symbols[i];
    }

    s.fs_ls[k] = sqrt_rho * (beta_f.value() + a * beta_l.value());
    s.fu[k] = sqrt_rho * (est_f.value() - beta_f.value());
    s.lu[k] = a * sqrt_rho * (est_l.value() - beta_l.value());
    s.fi[k] = sqrt_rho * interf_f;
    s.li[k] = a * sqrt_rho * interf_l;
    s.qn[k] = qn;
    s.n[k] = noise_f + a * noise_l;
    s.mrc_output[k] = out_f + out_l;
  }
  return s;
}

struct PowerStat {
  double mean = 0.0;
  double std_err = 0.0;
};

struct ComplexStat {
  std::complex<double> mean;
  double std_err = 0.0;  // sqrt((var_re + var_im) / n)
};

/// Empirical second moments per user: each decomposition family, the merged
/// FU+LU and FI+LI powers entering the rate denominator, and the cross
/// moments the analysis claims vanish.
struct UserMoments {
  PowerStat fs_ls, fu, lu, fu_lu, fi, li, fi_li, qn, n;
  ComplexStat fu_mean, lu_mean;
  ComplexStat fi_li_cross;      // E[FI * conj(LI)]
  ComplexStat signal_npi_cross; // E[(FS+LS) * conj(NPI)]

  const PowerStat& power(Term t) const {
    switch (t) {
      case Term::FsLs: return fs_ls;
      case Term::Fu: return fu;
      case Term::Lu: return lu;
      case Term::Fi: return fi;
      case Term::Li: return li;
      case Term::Qn: return qn;
      case Term::N: return n;
    }
    return fs_ls;
  }
};

struct MomentEstimate {
  std::vector<UserMoments> users;
  std::size_t n_trials = 0;
};

namespace detail {

struct PowerAcc {
  NeumaierSum sum, sum_sq;
  void add(std::complex<double> x) {
    const double p = std::norm(x);
    sum.add(p);
    sum_sq.add(p * p);
  }
  PowerStat finalize(std::size_t n) const {
    PowerStat s;
    s.mean = sum.value() / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq.value() / static_cast<double>(n) - s.mean * s.mean);
    s.std_err = std::sqrt(var / static_cast<double>(n));
    return s;
  }
};

struct ComplexAcc {
  NeumaierSum re, im, re_sq, im_sq;
  void add(std::complex<double> x) {
    re.add(x.real());
    im.add(x.imag());
    re_sq.add(x.real() * x.real());
    im_sq.add(x.imag() * x.imag());
  }
  ComplexStat finalize(std::size_t n) const {
    ComplexStat s;
    const double nd = static_cast<double>(n);
    s.mean = {re.value() / nd, im.value() / nd};
    const double var_re =
        std::max(0.0, re_sq.value() / nd - s.mean.real() * s.mean.real());
    const double var_im =
        std::max(0.0, im_sq.value() / nd - s.mean.imag() * s.mean.imag());
    s.std_err = std::sqrt((var_re + var_im) / nd);
    return s;
  }
};

}  // namespace detail

/// Runs n_trials independent draws; trial t consumes the substream derived
/// from (base_seed, t), so the estimate does not depend on execution order.
inline MomentEstimate estimate_moments(const LargeScaleMatrix& beta,
                                       const SystemConfig& config,
                                       std::size_t n_trials,
                                       std::uint64_t base_seed) {
  config.check_against(beta);
  if (n_trials < 100) {
    throw std::invalid_argument("estimate_moments: n_trials must be >= 100");
  }
  const std::size_t k_users = config.k_users;

  struct UserAcc {
    detail::PowerAcc fs_ls, fu, lu, fu_lu, fi, li, fi_li, qn, n;
    detail::ComplexAcc fu_mean, lu_mean, fi_li_cross, signal_npi_cross;
  };
  std::vector<UserAcc> acc(k_users);

  for (std::size_t t = 0; t < n_trials; ++t) {
    const auto trial = simulate_mrc_trial(
        beta, config, derive_seed(base_seed, detail::kSaltTrialIndex, t));
    for (std::size_t k = 0; k < k_users; ++k) {
      auto& a = acc[k];
      a.fs_ls.add(trial.fs_ls[k]);
      a.fu.add(trial.fu[k]);
      a.lu.add(trial.lu[k]);
      a.fu_lu.add(trial.fu[k] + trial.lu[k]);
      a.fi.add(trial.fi[k]);
      a.li.add(trial.li[k]);
      a.fi_li.add(trial.fi[k] + trial.li[k]);
      a.qn.add(trial.qn[k]);
      a.n.add(trial.n[k]);
      a.fu_mean.add(trial.fu[k]);
      a.lu_mean.add(trial.lu[k]);
      a.fi_li_cross.add(trial.fi[k] * std::conj(trial.li[k]));
      a.signal_npi_cross.add(trial.fs_ls[k] * std::conj(trial.npi(k)));
    }
  }

  MomentEstimate est;
  est.n_trials = n_trials;
  est.users.resize(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    auto& u = est.users[k];
    const auto& a = acc[k];
    u.fs_ls = a.fs_ls.finalize(n_trials);
    u.fu = a.fu.finalize(n_trials);
    u.lu = a.lu.finalize(n_trials);
    u.fu_lu = a.fu_lu.finalize(n_trials);
    u.fi = a.fi.finalize(n_trials);
    u.li = a.li.finalize(n_trials);
    u.fi_li = a.fi_li.finalize(n_trials);
    u.qn = a.qn.finalize(n_trials);
    u.n = a.n.finalize(n_trials);
    u.fu_mean = a.fu_mean.finalize(n_trials);
    u.lu_mean = a.lu_mean.finalize(n_trials);
    u.fi_li_cross = a.fi_li_cross.finalize(n_trials);
    u.signal_npi_cross = a.signal_npi_cross.finalize(n_trials);
  }
  return est;
}

/// Worst-case rate with empirical noise-plus-interference moments and the
/// analytical desired-signal power.
inline SEReport empirical_se(const MomentEstimate& moments,
                             const LargeScaleMatrix& beta,
                             const SystemConfig& config) {
  config.check_against(beta);
  if (moments.users.size() != config.k_users) {
    throw std::invalid_argument("empirical_se: moment/user count mismatch");
  }
  std::vector<double> sinr(config.k_users);
  for (std::size_t k = 0; k < config.k_users; ++k) {
    const auto closed = sinr_components(beta, config, k);
    const auto& u = moments.users[k];
    const double den =
        u.fu_lu.mean + u.fi_li.mean + u.qn.mean + u.n.mean;
    sinr[k] = closed.fs_ls_power / den;
  }
  return detail::report_from_sinrs(sinr, config);
}

struct VerificationRow {
  std::size_t user = 0;
  Term term = Term::FsLs;
  double closed_form = 0.0;
  double empirical = 0.0;
  double std_err = 0.0;
  double z_score = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  std::size_t n_trials = 0;
  double rel_tol = 0.0;
  bool all_pass = true;
};

/// Compares every closed-form moment against its Monte Carlo estimate.
/// A row passes inside 3 standard errors or inside the relative floor that
/// absorbs floating-point accumulation on large instances. Failures are
/// report content, not exceptions.
inline VerificationReport verify_bound(const LargeScaleMatrix& beta,
                                       const SystemConfig& config,
                                       std::size_t n_trials,
                                       std::uint64_t base_seed,
                                       double rel_tol = 1e-3) {
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("verify_bound: rel_tol must be positive");
  }
  const auto est = estimate_moments(beta, config, n_trials, base_seed);

  VerificationReport report;
  report.n_trials = n_trials;
  report.rel_tol = rel_tol;
  for (std::size_t k = 0; k < config.k_users; ++k) {
    const auto closed = sinr_components(beta, config, k);
    const auto closed_of = [&](Term t) {
      switch (t) {
        case Term::FsLs: return closed.fs_ls_power;
        case Term::Fu: return closed.fu_power;
        case Term::Lu: return closed.lu_power;
        case Term::Fi: return closed.fi_power;
        case Term::Li: return closed.li_power;
        case Term::Qn: return closed.qn_power;
        case Term::N: return closed.n_power;
      }
      return 0.0;
    };
    for (Term t : kAllTerms) {
      VerificationRow row;
      row.user = k;
      row.term = t;
      row.closed_form = closed_of(t);
      const auto& stat = est.users[k].power(t);
      row.empirical = stat.mean;
      row.std_err = stat.std_err;
      const double gap = std::abs(row.empirical - row.closed_form);
      const double scale = std::max(std::abs(row.closed_form),
                                    std::abs(row.empirical));
      row.z_score = row.std_err > 0.0 ? (row.empirical - row.closed_form) /
                                            row.std_err
                                      : 0.0;
      const bool within_z = row.std_err > 0.0 && std::abs(row.z_score) <= 3.0;
      const bool within_rel = gap <= rel_tol * scale || gap == 0.0;
      row.pass = within_z || within_rel;
      report.all_pass = report.all_pass && row.pass;
      report.rows.push_back(row);
    }
  }
  return report;
}

inline void write_verification(std::ostream& os,
                               const VerificationReport& report) {
  os << "# n_trials " << report.n_trials << " rel_tol "
     << format_full(report.rel_tol) << " overall "
     << (report.all_pass ? "pass" : "fail") << "\n";
  os << "user term closed_form empirical std_err z_score pass\n";
  for (const auto& r : report.rows) {
    os << r.user << ' ' << term_name(r.term) << ' '
       << format_full(r.closed_form) << ' ' << format_full(r.empirical) << ' '
       << format_full(r.std_err) << ' ' << format_full(r.z_score) << ' '
       << (r.pass ? 1 : 0) << "\n";
  }
}

}  // namespace dmimo
