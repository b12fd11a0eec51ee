#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmimo/energy.hpp"
#include "dmimo/quantization.hpp"

namespace dmimo {

/// Raised for anything wrong with a scenario file; the message names the
/// offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { ClosedForm, MonteCarlo, Verify, EeGrid, CentralizedBaseline };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::ClosedForm: return "closed_form";
    case Mode::MonteCarlo: return "monte_carlo";
    case Mode::Verify: return "verify";
    case Mode::EeGrid: return "ee_grid";
    case Mode::CentralizedBaseline: return "centralized_baseline";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "closed_form") return Mode::ClosedForm;
  if (s == "monte_carlo") return Mode::MonteCarlo;
  if (s == "verify") return Mode::Verify;
  if (s == "ee_grid") return Mode::EeGrid;
  if (s == "centralized_baseline") return Mode::CentralizedBaseline;
  throw ConfigError("mode: unknown value '" + s + "'");
}

/// One experiment scenario. Defaults reproduce the reference deployment:
/// 100 RRHs (20 full-resolution), 20 users on 1 km^2 with a 50 m guard zone,
/// gamma 3.8, 8 dB shadowing, 10 dB SNR, 3-bit low-resolution ADCs, 10 MHz.
struct ExperimentConfig {
  std::string scenario = "default";
  Mode mode = Mode::ClosedForm;

  // topology
  double area_side_km = 1.0;
  std::size_t m_full = 20;
  std::size_t m_low = 80;
  std::size_t k_users = 20;
  double guard_radius_km = 0.05;

  // fading
  double gamma = 3.8;
  double sigma_shad_db = 8.0;

  // system
  double rho_db = 10.0;
  std::optional<int> bits = 3;  // nullopt = full-resolution L class
  double bandwidth_hz = 10.0e6;

  // run
  std::size_t n_topologies = 200;
  std::size_t n_trials = 100000;
  std::uint64_t base_seed = 1;

  // ee grid
  std::vector<std::size_t> ee_grid_m_low = {0, 10, 20, 30, 40, 50,
                                            60, 70, 80, 90, 100};
  std::vector<int> ee_grid_bits = {1, 2, 3, 4, 5, 6, 7, 8};
  double ee_threshold_bps = 1.0e8;
  PowerModel power{};

  // verify
  double verify_rel_tol = 1e-3;

  double rho_linear() const { return std::pow(10.0, rho_db / 10.0); }
  double alpha() const { return bits ? lloyd_max_alpha(*bits) : 1.0; }

  void validate() const {
    if (scenario.empty()) throw ConfigError("scenario: must be nonempty");
    if (!(area_side_km > 0.0)) {
      throw ConfigError("topology.area_side_km: must be positive");
    }
    if (m_full + m_low == 0) {
      throw ConfigError("topology.m_full/m_low: at least one RRH required");
    }
    if (k_users == 0) throw ConfigError("topology.k_users: must be >= 1");
    if (guard_radius_km < 0.0 || guard_radius_km >= area_side_km / 2.0) {
      throw ConfigError(
          "topology.guard_radius_km: must lie in [0, area_side_km/2)");
    }
    if (!(gamma > 0.0)) throw ConfigError("fading.gamma: must be positive");
    if (!(sigma_shad_db >= 0.0)) {
      throw ConfigError("fading.sigma_shad_db: must be >= 0");
    }
    if (!std::isfinite(rho_db)) throw ConfigError("system.rho_db: must be finite");
    if (bits && (*bits < 1 || *bits > 16)) {
      throw ConfigError("system.bits: must lie in [1, 16] or be \"full\"");
    }
    if (!(bandwidth_hz > 0.0)) {
      throw ConfigError("system.bandwidth_hz: must be positive");
    }
    if (n_topologies == 0) throw ConfigError("run.n_topologies: must be >= 1");
    if (mode == Mode::MonteCarlo || mode == Mode::Verify) {
      if (n_trials < 100) throw ConfigError("run.n_trials: must be >= 100");
    }
    if (mode == Mode::EeGrid) {
      if (ee_grid_m_low.empty()) {
        throw ConfigError("ee.grid_m_low: must be nonempty");
      }
      if (ee_grid_bits.empty()) throw ConfigError("ee.grid_bits: must be nonempty");
      for (int b : ee_grid_bits) {
        if (b < 1 || b > 16) {
          throw ConfigError("ee.grid_bits: entries must lie in [1, 16]");
        }
      }
      if (!(ee_threshold_bps >= 0.0)) {
        throw ConfigError("ee.threshold_bps: must be >= 0");
      }
      try {
        power.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ee.power: ") + e.what());
      }
    }
    if (!(verify_rel_tol > 0.0)) {
      throw ConfigError("verify.rel_tol: must be positive");
    }
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& obj, const std::string& prefix,
                       const std::vector<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(prefix + key + ": unknown key");
    }
  }
}

template <typename T>
void read_field(const json& obj, const std::string& prefix,
                const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + key + ": wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::read_field;
  if (!j.is_object()) throw ConfigError("config root: must be an object");
  detail::check_keys(
      j, "", {"scenario", "mode", "topology", "fading", "system", "run", "ee",
              "verify"});

  ExperimentConfig c;
  read_field(j, "", "scenario", c.scenario);
  if (j.contains("mode")) {
    std::string m;
    read_field(j, "", "mode", m);
    c.mode = mode_from_string(m);
  }
  if (j.contains("topology")) {
    const auto& t = j.at("topology");
    detail::check_keys(t, "topology.",
                       {"area_side_km", "m_full", "m_low", "k_users",
                        "guard_radius_km"});
    read_field(t, "topology.", "area_side_km", c.area_side_km);
    read_field(t, "topology.", "m_full", c.m_full);
    read_field(t, "topology.", "m_low", c.m_low);
    read_field(t, "topology.", "k_users", c.k_users);
    read_field(t, "topology.", "guard_radius_km", c.guard_radius_km);
  }
  if (j.contains("fading")) {
    const auto& f = j.at("fading");
    detail::check_keys(f, "fading.", {"gamma", "sigma_shad_db"});
    read_field(f, "fading.", "gamma", c.gamma);
    read_field(f, "fading.", "sigma_shad_db", c.sigma_shad_db);
  }
  if (j.contains("system")) {
    const auto& s = j.at("system");
    detail::check_keys(s, "system.", {"rho_db", "bits", "bandwidth_hz"});
    read_field(s, "system.", "rho_db", c.rho_db);
    read_field(s, "system.", "bandwidth_hz", c.bandwidth_hz);
    if (s.contains("bits")) {
      const auto& b = s.at("bits");
      if (b.is_string()) {
        if (b.get<std::string>() != "full") {
          throw ConfigError("system.bits: string form must be \"full\"");
        }
        c.bits.reset();
      } else if (b.is_number_integer()) {
        c.bits = b.get<int>();
      } else {
        throw ConfigError("system.bits: must be an integer or \"full\"");
      }
    }
  }
  if (j.contains("run")) {
    const auto& r = j.at("run");
    detail::check_keys(r, "run.", {"n_topologies", "n_trials", "base_seed"});
    read_field(r, "run.", "n_topologies", c.n_topologies);
    read_field(r, "run.", "n_trials", c.n_trials);
    read_field(r, "run.", "base_seed", c.base_seed);
  }
  if (j.contains("ee")) {
    const auto& e = j.at("ee");
    detail::check_keys(e, "ee.",
                       {"grid_m_low", "grid_bits", "threshold_bps", "power"});
    read_field(e, "ee.", "grid_m_low", c.ee_grid_m_low);
    read_field(e, "ee.", "grid_bits", c.ee_grid_bits);
    read_field(e, "ee.", "threshold_bps", c.ee_threshold_bps);
    if (e.contains("power")) {
      const auto& p = e.at("power");
      detail::check_keys(p, "ee.power.", {"c0_watt", "c1_watt", "b_full"});
      read_field(p, "ee.power.", "c0_watt", c.power.c0_watt);
      read_field(p, "ee.power.", "c1_watt", c.power.c1_watt);
      read_field(p, "ee.power.", "b_full", c.power.b_full);
    }
  }
  if (j.contains("verify")) {
    const auto& v = j.at("verify");
    detail::check_keys(v, "verify.", {"rel_tol"});
    read_field(v, "verify.", "rel_tol", c.verify_rel_tol);
  }
  c.validate();
  return c;
}

/// Fully resolved form with every default materialized; what run outputs echo.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = c.scenario;
  j["mode"] = mode_name(c.mode);
  j["topology"] = {{"area_side_km", c.area_side_km},
                   {"m_full", c.m_full},
                   {"m_low", c.m_low},
                   {"k_users", c.k_users},
                   {"guard_radius_km", c.guard_radius_km}};
  j["fading"] = {{"gamma", c.gamma}, {"sigma_shad_db", c.sigma_shad_db}};
  j["system"] = nlohmann::ordered_json::object();
  j["system"]["rho_db"] = c.rho_db;
  if (c.bits) {
    j["system"]["bits"] = *c.bits;
  } else {
    j["system"]["bits"] = "full";
  }
  j["system"]["alpha"] = c.alpha();
  j["system"]["bandwidth_hz"] = c.bandwidth_hz;
  j["run"] = {{"n_topologies", c.n_topologies},
              {"n_trials", c.n_trials},
              {"base_seed", c.base_seed}};
  j["ee"] = {{"grid_m_low", c.ee_grid_m_low},
             {"grid_bits", c.ee_grid_bits},
             {"threshold_bps", c.ee_threshold_bps},
             {"power",
              {{"c0_watt", c.power.c0_watt},
               {"c1_watt", c.power.c1_watt},
               {"b_full", c.power.b_full}}}};
  j["verify"] = {{"rel_tol", c.verify_rel_tol}};
  return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  return config_from_json(j);
}

}  // namespace dmimo
