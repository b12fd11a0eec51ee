#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/closed_form.hpp"
#include "dmimo/linalg.hpp"
#include "dmimo/quantization.hpp"
#include "dmimo/tabular.hpp"
#include "dmimo/topology.hpp"

namespace dmimo {

/// Per-RRH power model: c0 * 2^(2B) + c1 per radio head. b_full is the
/// bit-depth charged to full-resolution ADCs; the conventional 12-bit
/// receiver by default, configurable because the constant is a modeling
/// assumption rather than a measured value.
struct PowerModel {
  double c0_watt = 1e-4;
  double c1_watt = 2.0;
  int b_full = 12;

  void validate() const {
    if (!(c0_watt > 0.0) || !(c1_watt > 0.0)) {
      throw std::invalid_argument("power model: c0 and c1 must be positive");
    }
    if (b_full < 1) {
      throw std::invalid_argument("power model: b_full must be >= 1");
    }
  }
};

inline double power_consumption(std::size_t m_count, int bits,
                                const PowerModel& model) {
  model.validate();
  if (bits < 1) {
    throw std::invalid_argument("power_consumption: bits must be >= 1");
  }
  return static_cast<double>(m_count) *
         (model.c0_watt * std::exp2(2.0 * bits) + model.c1_watt);
}

inline double energy_efficiency(double sum_rate_bps_hz, double bandwidth_hz,
                                double p_full_w, double p_low_w) {
  if (!(p_full_w + p_low_w > 0.0)) {
    throw std::invalid_argument("energy_efficiency: total power must be positive");
  }
  return bandwidth_hz * sum_rate_bps_hz / (p_full_w + p_low_w);
}

/// Deployment recipe for the energy-efficiency sweep: fixed full-resolution
/// block, fading law and SNR; the grid varies the low-resolution block and
/// its bit depth.
struct EERecipe {
  double area_side_km = 1.0;
  std::size_t m_full = 20;
  std::size_t k_users = 20;
  double guard_radius_km = 0.05;
  double gamma = 3.8;
  double sigma_shad_db = 8.0;
  double rho = 10.0;  // linear
  double bandwidth_hz = 10.0e6;
};

struct EEGridPoint {
  std::size_t m_low = 0;
  int bits = 1;
  double mean_throughput_bps = 0.0;  // sum throughput averaged over layouts
  double power_w = 0.0;
  double eta_bits_per_joule = 0.0;
  bool feasible = false;
};

struct EEGridResult {
  std::vector<EEGridPoint> points;  // grid order: m_low outer, bits inner
  std::optional<EEGridPoint> best;  // max eta among feasible points
  double threshold_bps = 0.0;
};

namespace detail {
constexpr std::uint64_t kSaltEeTopology = 0x65655450ULL;
constexpr std::uint64_t kSaltEeFading = 0x65654641ULL;
}  // namespace detail

/// Evaluates mean sum throughput, power and energy efficiency over the
/// (m_low, bits) grid, averaging the closed-form bound over seeded layouts.
/// Layouts are drawn once per topology index with the largest m_low; smaller
/// grid points reuse the leading rows, so moving along the m_low axis means
/// literally adding radio heads to the same deployment.
inline EEGridResult optimize_config(const EERecipe& recipe,
                                    const PowerModel& model,
                                    const std::vector<std::size_t>& grid_m_low,
                                    const std::vector<int>& grid_bits,
                                    double threshold_bps,
                                    std::size_t n_topologies,
                                    std::uint64_t seed) {
  model.validate();
  if (grid_m_low.empty() || grid_bits.empty()) {
    throw std::invalid_argument("optimize_config: grids must be nonempty");
  }
  if (n_topologies == 0) {
    throw std::invalid_argument("optimize_config: n_topologies must be >= 1");
  }
  if (!(threshold_bps >= 0.0)) {
    throw std::invalid_argument("optimize_config: threshold must be >= 0");
  }
  const std::size_t max_m_low =
      *std::max_element(grid_m_low.begin(), grid_m_low.end());
  if (recipe.m_full + *std::min_element(grid_m_low.begin(), grid_m_low.end()) ==
      0) {
    throw std::invalid_argument(
        "optimize_config: a grid point would have zero RRHs");
  }

  std::vector<NeumaierSum> sum_rate_acc(grid_m_low.size() * grid_bits.size());
  for (std::size_t t = 0; t < n_topologies; ++t) {
    const auto topo = generate_topology(
        recipe.area_side_km, recipe.m_full, max_m_low, recipe.k_users,
        recipe.guard_radius_km, derive_seed(seed, detail::kSaltEeTopology, t));
    const auto dist = pairwise_distances(topo);
    const FadingParams fading{recipe.gamma, recipe.sigma_shad_db,
                              derive_seed(seed, detail::kSaltEeFading, t)};
    const auto pooled = large_scale_fading(dist, fading);

    for (std::size_t mi = 0; mi < grid_m_low.size(); ++mi) {
      const std::size_t m_low = grid_m_low[mi];
      LargeScaleMatrix sub;
      sub.m_full = recipe.m_full;
      sub.beta = RealMatrix(recipe.m_full + m_low, recipe.k_users);
      for (std::size_t m = 0; m < sub.beta.rows(); ++m) {
        for (std::size_t k = 0; k < recipe.k_users; ++k) {
          sub.beta(m, k) = pooled.beta(m, k);
        }
      }
      for (std::size_t bi = 0; bi < grid_bits.size(); ++bi) {
        SystemConfig cfg;
        cfg.rho = recipe.rho;
        cfg.alpha = lloyd_max_alpha(grid_bits[bi]);
        cfg.m_full = recipe.m_full;
        cfg.m_low = m_low;
        cfg.k_users = recipe.k_users;
        cfg.bandwidth_hz = recipe.bandwidth_hz;
        const auto report = se_mixed(sub, cfg);
        sum_rate_acc[mi * grid_bits.size() + bi].add(report.sum_rate_bps_hz);
      }
    }
  }

  EEGridResult result;
  result.threshold_bps = threshold_bps;
  for (std::size_t mi = 0; mi < grid_m_low.size(); ++mi) {
    for (std::size_t bi = 0; bi < grid_bits.size(); ++bi) {
      EEGridPoint p;
      p.m_low = grid_m_low[mi];
      p.bits = grid_bits[bi];
      const double mean_rate = sum_rate_acc[mi * grid_bits.size() + bi].value() /
                               static_cast<double>(n_topologies);
      p.mean_throughput_bps = recipe.bandwidth_hz * mean_rate;
      const double p_full =
          power_consumption(recipe.m_full, model.b_full, model);
      const double p_low = power_consumption(p.m_low, p.bits, model);
      p.power_w = p_full + p_low;
      p.eta_bits_per_joule =
          energy_efficiency(mean_rate, recipe.bandwidth_hz, p_full, p_low);
      p.feasible = p.mean_throughput_bps >= threshold_bps;
      if (p.feasible &&
          (!result.best ||
           p.eta_bits_per_joule > result.best->eta_bits_per_joule)) {
        result.best = p;
      }
      result.points.push_back(p);
    }
  }
  return result;
}

inline void write_ee_surface(std::ostream& os, const EEGridResult& r) {
  os << "# threshold_bps " << format_full(r.threshold_bps) << " best ";
  if (r.best) {
    os << "m_low " << r.best->m_low << " bits " << r.best->bits << " eta "
       << format_full(r.best->eta_bits_per_joule);
  } else {
    os << "none";
  }
  os << "\n";
  os << "m_low bits mean_throughput_bps power_w eta_bits_per_joule feasible\n";
  for (const auto& p : r.points) {
    os << p.m_low << ' ' << p.bits << ' ' << format_full(p.mean_throughput_bps)
       << ' ' << format_full(p.power_w) << ' '
       << format_full(p.eta_bits_per_joule) << ' ' << (p.feasible ? 1 : 0)
       << "\n";
  }
}

}  // namespace dmimo
