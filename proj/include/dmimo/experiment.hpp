#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/closed_form.hpp"
#include "dmimo/config.hpp"
#include "dmimo/energy.hpp"
#include "dmimo/monte_carlo.hpp"
#include "dmimo/quantization.hpp"
#include "dmimo/stats.hpp"
#include "dmimo/topology.hpp"

namespace dmimo {

namespace detail {
constexpr std::uint64_t kSaltExpTopology = 0x78544f50ULL;
constexpr std::uint64_t kSaltExpFading = 0x78464144ULL;
constexpr std::uint64_t kSaltExpTrials = 0x784d4341ULL;
}  // namespace detail

inline std::uint64_t topology_seed(const ExperimentConfig& c, std::size_t t) {
  return derive_seed(c.base_seed, detail::kSaltExpTopology, t);
}
inline std::uint64_t fading_seed(const ExperimentConfig& c, std::size_t t) {
  return derive_seed(c.base_seed, detail::kSaltExpFading, t);
}

inline SystemConfig system_config(const ExperimentConfig& c) {
  SystemConfig s;
  s.rho = c.rho_linear();
  s.alpha = c.alpha();
  s.m_full = c.m_full;
  s.m_low = c.m_low;
  s.k_users = c.k_users;
  s.bandwidth_hz = c.bandwidth_hz;
  return s;
}

inline NetworkTopology draw_topology(const ExperimentConfig& c,
                                     std::size_t t) {
  return generate_topology(c.area_side_km, c.m_full, c.m_low, c.k_users,
                           c.guard_radius_km, topology_seed(c, t));
}

inline LargeScaleMatrix draw_large_scale(const ExperimentConfig& c,
                                         std::size_t t) {
  const auto topo = draw_topology(c, t);
  const FadingParams fading{c.gamma, c.sigma_shad_db, fading_seed(c, t)};
  return large_scale_fading(pairwise_distances(topo), fading);
}

/// One per-topology SE report for the rate-producing modes.
inline SEReport report_for_topology(const ExperimentConfig& c, std::size_t t) {
  const auto cfg = system_config(c);
  SEReport report;
  switch (c.mode) {
    case Mode::ClosedForm: {
      report = se_mixed(draw_large_scale(c, t), cfg);
      break;
    }
    case Mode::CentralizedBaseline: {
      const auto topo = collocate(draw_topology(c, t));
      const FadingParams fading{c.gamma, c.sigma_shad_db, fading_seed(c, t)};
      const auto beta_users =
          large_scale_fading_colocated(pairwise_distances(topo), fading);
      const double kappa = static_cast<double>(c.m_full) /
                           static_cast<double>(c.m_full + c.m_low);
      report = se_colocated(beta_users, kappa, cfg, c.m_full + c.m_low);
      break;
    }
    case Mode::MonteCarlo: {
      const auto beta = draw_large_scale(c, t);
      const auto moments =
          estimate_moments(beta, cfg, c.n_trials,
                           derive_seed(c.base_seed, detail::kSaltExpTrials, t));
      report = empirical_se(moments, beta, cfg);
      break;
    }
    default:
      throw std::invalid_argument(
          "report_for_topology: mode does not produce SE reports");
  }
  report.meta.bits = c.bits;
  report.meta.seeds = {c.base_seed, topology_seed(c, t), fading_seed(c, t)};
  report.meta.label = c.scenario;
  return report;
}

inline bool rate_producing(Mode m) {
  return m == Mode::ClosedForm || m == Mode::CentralizedBaseline ||
         m == Mode::MonteCarlo;
}

/// Per-user throughput samples pooled over all topology draws.
inline std::vector<double> throughput_samples(const ExperimentConfig& c) {
  std::vector<double> samples;
  samples.reserve(c.n_topologies * c.k_users);
  for (std::size_t t = 0; t < c.n_topologies; ++t) {
    const auto report = report_for_topology(c, t);
    samples.insert(samples.end(), report.per_user_throughput_bps.begin(),
                   report.per_user_throughput_bps.end());
  }
  return samples;
}

struct RunOutput {
  std::vector<std::filesystem::path> files;
  bool verify_pass = true;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

inline void write_rates_table(std::ostream& os, const ExperimentConfig& c,
                              const std::vector<SEReport>& reports) {
  os << "# scenario " << c.scenario << " mode " << mode_name(c.mode) << "\n";
  os << "# m_full " << c.m_full << " m_low " << c.m_low << " k_users "
     << c.k_users << " bits "
     << (c.bits ? std::to_string(*c.bits) : std::string("full")) << " alpha "
     << format_full(c.alpha()) << " rho_db " << format_full(c.rho_db)
     << " bandwidth_hz " << format_full(c.bandwidth_hz) << " base_seed "
     << c.base_seed << " n_topologies " << c.n_topologies << "\n";
  os << "topology user_id rate_bps_hz throughput_bps\n";
  for (std::size_t t = 0; t < reports.size(); ++t) {
    const auto& r = reports[t];
    for (std::size_t k = 0; k < r.per_user_rate_bps_hz.size(); ++k) {
      os << t << ' ' << k << ' ' << format_full(r.per_user_rate_bps_hz[k])
         << ' ' << format_full(r.per_user_throughput_bps[k]) << "\n";
    }
  }
}

}  // namespace detail

/// Executes the configured mode and writes its tables plus the resolved
/// config into out_dir. Every output is a pure function of the config.
inline RunOutput run_experiment(const ExperimentConfig& c,
                                const std::filesystem::path& out_dir) {
  c.validate();
  std::filesystem::create_directories(out_dir);
  RunOutput out;

  {
    const auto path = out_dir / "resolved_config.json";
    auto os = detail::open_output(path);
    os << config_to_json(c).dump(2) << "\n";
    out.files.push_back(path);
  }

  if (rate_producing(c.mode)) {
    std::vector<SEReport> reports;
    reports.reserve(c.n_topologies);
    std::vector<double> samples;
    samples.reserve(c.n_topologies * c.k_users);
    for (std::size_t t = 0; t < c.n_topologies; ++t) {
      reports.push_back(report_for_topology(c, t));
      samples.insert(samples.end(),
                     reports.back().per_user_throughput_bps.begin(),
                     reports.back().per_user_throughput_bps.end());
    }
    {
      const auto path = out_dir / "rates.txt";
      auto os = detail::open_output(path);
      detail::write_rates_table(os, c, reports);
      out.files.push_back(path);
    }
    {
      const auto path = out_dir / "cdf.txt";
      auto os = detail::open_output(path);
      write_cdf(os, compute_cdf(samples));
      out.files.push_back(path);
    }
  } else if (c.mode == Mode::Verify) {
    const auto beta = draw_large_scale(c, 0);
    const auto report =
        verify_bound(beta, system_config(c), c.n_trials,
                     derive_seed(c.base_seed, detail::kSaltExpTrials, 0),
                     c.verify_rel_tol);
    const auto path = out_dir / "verification.txt";
    auto os = detail::open_output(path);
    write_verification(os, report);
    out.files.push_back(path);
    out.verify_pass = report.all_pass;
  } else {  // Mode::EeGrid
    EERecipe recipe;
    recipe.area_side_km = c.area_side_km;
    recipe.m_full = c.m_full;
    recipe.k_users = c.k_users;
    recipe.guard_radius_km = c.guard_radius_km;
    recipe.gamma = c.gamma;
    recipe.sigma_shad_db = c.sigma_shad_db;
    recipe.rho = c.rho_linear();
    recipe.bandwidth_hz = c.bandwidth_hz;
    const auto result =
        optimize_config(recipe, c.power, c.ee_grid_m_low, c.ee_grid_bits,
                        c.ee_threshold_bps, c.n_topologies, c.base_seed);
    const auto path = out_dir / "ee_surface.txt";
    auto os = detail::open_output(path);
    write_ee_surface(os, result);
    out.files.push_back(path);
  }
  return out;
}

struct ComparisonResult {
  CdfTable cdf_a;
  CdfTable cdf_b;
  double p95_a = 0.0;
  double p95_b = 0.0;
  double ratio = 0.0;  // p95_a / p95_b
};

/// Paired CDFs of two scenarios. Topology seeds derive from each config's
/// base_seed, so scenarios sharing base_seed and topology parameters see the
/// same layouts.
inline ComparisonResult compare_scenarios(const ExperimentConfig& a,
                                          const ExperimentConfig& b) {
  a.validate();
  b.validate();
  if (!rate_producing(a.mode) || !rate_producing(b.mode)) {
    throw ConfigError("compare: both scenarios must produce rate CDFs");
  }
  if (a.k_users != b.k_users) {
    throw ConfigError("compare: scenarios must share topology.k_users");
  }
  if (a.bandwidth_hz != b.bandwidth_hz) {
    throw ConfigError("compare: scenarios must share system.bandwidth_hz");
  }
  ComparisonResult r;
  r.cdf_a = compute_cdf(throughput_samples(a));
  r.cdf_b = compute_cdf(throughput_samples(b));
  r.p95_a = r.cdf_a.p95_likely();
  r.p95_b = r.cdf_b.p95_likely();
  r.ratio = r.p95_a / r.p95_b;
  return r;
}

inline void write_comparison(std::ostream& os, const ComparisonResult& r,
                             const std::string& label_a,
                             const std::string& label_b) {
  os << "scenario p95_likely_bps\n";
  os << label_a << ' ' << format_full(r.p95_a) << "\n";
  os << label_b << ' ' << format_full(r.p95_b) << "\n";
  os << "# ratio_a_over_b " << format_full(r.ratio) << "\n";
}

}  // namespace dmimo
