#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmimo/linalg.hpp"
#include "dmimo/rng.hpp"
#include "dmimo/tabular.hpp"

namespace dmimo {

enum class AdcClass { FullRes, LowRes };

struct Point {
  double x_km = 0.0;
  double y_km = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_km(const Point& a, const Point& b) {
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

struct Rrh {
  Point position;
  AdcClass adc = AdcClass::FullRes;
  friend bool operator==(const Rrh&, const Rrh&) = default;
};

/// Square deployment area holding single-antenna radio heads (full-resolution
/// block first, then low-resolution) and user terminals.
struct NetworkTopology {
  double area_side_km = 0.0;
  double guard_radius_km = 0.0;
  std::vector<Rrh> rrhs;
  std::vector<Point> users;

  std::size_t m_total() const { return rrhs.size(); }
  std::size_t k_users() const { return users.size(); }

  std::size_t m_full() const {
    std::size_t n = 0;
    for (const auto& r : rrhs) {
      if (r.adc == AdcClass::FullRes) ++n;
    }
    return n;
  }
  std::size_t m_low() const { return rrhs.size() - m_full(); }

  /// Checks ordering (full-resolution rows first), area bounds and the guard
  /// separation of every RRH/user pair. Throws std::invalid_argument.
  void validate() const {
    if (!(area_side_km > 0.0)) {
      throw std::invalid_argument("topology: area_side_km must be positive");
    }
    if (rrhs.empty() || users.empty()) {
      throw std::invalid_argument("topology: needs at least one RRH and one user");
    }
    bool seen_low = false;
    for (const auto& r : rrhs) {
      if (r.adc == AdcClass::LowRes) {
        seen_low = true;
      } else if (seen_low) {
        throw std::invalid_argument(
            "topology: full-resolution RRHs must precede low-resolution ones");
      }
    }
    auto in_area = [&](const Point& p) {
      return p.x_km >= 0.0 && p.x_km <= area_side_km && p.y_km >= 0.0 &&
             p.y_km <= area_side_km;
    };
    for (const auto& r : rrhs) {
      if (!in_area(r.position)) {
        throw std::invalid_argument("topology: RRH outside deployment area");
      }
    }
    for (const auto& u : users) {
      if (!in_area(u)) {
        throw std::invalid_argument("topology: user outside deployment area");
      }
      for (const auto& r : rrhs) {
        if (distance_km(r.position, u) < guard_radius_km) {
          throw std::invalid_argument("topology: guard radius violated");
        }
      }
    }
  }

  friend bool operator==(const NetworkTopology&, const NetworkTopology&) =
      default;
};

/// RRH-to-user distances; rows follow the topology's RRH order, so the
/// full-resolution block comes first.
struct DistanceMatrix {
  RealMatrix d_km;
  std::size_t m_full = 0;
};

namespace detail {
constexpr std::uint64_t kSaltRrhStream = 0x52524853ULL;   // RRH placement
constexpr std::uint64_t kSaltUserStream = 0x55534552ULL;  // user placement
}  // namespace detail

/// Draws RRHs and users i.i.d. uniform over the square. Users are re-drawn
/// until they respect the guard radius against every already-placed RRH; RRH
/// placement itself is unconditioned. RRHs and users consume independent
/// substreams, so growing the low-resolution block keeps the full-resolution
/// draws and the low-resolution prefix unchanged for a fixed seed.
inline NetworkTopology generate_topology(double area_side_km,
                                         std::size_t m_full, std::size_t m_low,
                                         std::size_t k_users,
                                         double guard_radius_km,
                                         std::uint64_t seed) {
  if (!(area_side_km > 0.0)) {
    throw std::invalid_argument("generate_topology: area_side_km must be positive");
  }
  if (m_full + m_low == 0) {
    throw std::invalid_argument("generate_topology: at least one RRH required");
  }
  if (k_users == 0) {
    throw std::invalid_argument("generate_topology: at least one user required");
  }
  if (guard_radius_km < 0.0 || guard_radius_km >= area_side_km / 2.0) {
    throw std::invalid_argument(
        "generate_topology: guard_radius_km must lie in [0, area_side_km/2)");
  }

  constexpr int kMaxUserRedraws = 10000;

  NetworkTopology topo;
  topo.area_side_km = area_side_km;
  topo.guard_radius_km = guard_radius_km;
  topo.rrhs.reserve(m_full + m_low);
  topo.users.reserve(k_users);

  auto rrh_rng = make_engine(seed, detail::kSaltRrhStream);
  auto user_rng = make_engine(seed, detail::kSaltUserStream);
  std::uniform_real_distribution<double> coord(0.0, area_side_km);

  for (std::size_t m = 0; m < m_full + m_low; ++m) {
    const double x = coord(rrh_rng);
    const double y = coord(rrh_rng);
    topo.rrhs.push_back(
        {{x, y}, m < m_full ? AdcClass::FullRes : AdcClass::LowRes});
  }

  for (std::size_t k = 0; k < k_users; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxUserRedraws; ++attempt) {
      const double x = coord(user_rng);
      const double y = coord(user_rng);
      const Point candidate{x, y};
      bool clear = true;
      for (const auto& r : topo.rrhs) {
        if (distance_km(r.position, candidate) < guard_radius_km) {
          clear = false;
          break;
        }
      }
      if (clear) {
        topo.users.push_back(candidate);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::runtime_error(
          "generate_topology: guard constraint infeasible, gave up after 10000 "
          "redraws for one user");
    }
  }
  return topo;
}

inline DistanceMatrix pairwise_distances(const NetworkTopology& topo) {
  topo.validate();
  DistanceMatrix out;
  out.m_full = topo.m_full();
  out.d_km = RealMatrix(topo.m_total(), topo.k_users());
  for (std::size_t m = 0; m < topo.m_total(); ++m) {
    for (std::size_t k = 0; k < topo.k_users(); ++k) {
      out.d_km(m, k) = distance_km(topo.rrhs[m].position, topo.users[k]);
    }
  }
  return out;
}

/// Centralized baseline: every RRH moves to the area center; users, ADC tags
/// and counts stay put. Collocation cannot honor the guard against users near
/// the center, so the returned layout carries guard_radius 0.
inline NetworkTopology collocate(const NetworkTopology& topo) {
  topo.validate();
  NetworkTopology out = topo;
  const Point center{topo.area_side_km / 2.0, topo.area_side_km / 2.0};
  for (auto& r : out.rrhs) r.position = center;
  out.guard_radius_km = 0.0;
  return out;
}

inline void write_topology(std::ostream& os, const NetworkTopology& topo) {
  os << "# area_side_km " << format_full(topo.area_side_km)
     << " guard_radius_km " << format_full(topo.guard_radius_km) << "\n";
  os << "kind x_km y_km\n";
  for (const auto& r : topo.rrhs) {
    os << (r.adc == AdcClass::FullRes ? 'F' : 'L') << ' '
       << format_full(r.position.x_km) << ' ' << format_full(r.position.y_km)
       << "\n";
  }
  for (const auto& u : topo.users) {
    os << 'U' << ' ' << format_full(u.x_km) << ' ' << format_full(u.y_km)
       << "\n";
  }
}

inline NetworkTopology read_topology(std::istream& is) {
  NetworkTopology topo;
  const auto meta = split_tokens(expect_line(is, "topology metadata line"));
  if (meta.size() != 5 || meta[0] != "#" || meta[1] != "area_side_km" ||
      meta[3] != "guard_radius_km") {
    throw std::runtime_error("topology: malformed metadata line");
  }
  topo.area_side_km = parse_double(meta[2]);
  topo.guard_radius_km = parse_double(meta[4]);
  const auto header = split_tokens(expect_line(is, "topology column header"));
  if (header != std::vector<std::string>{"kind", "x_km", "y_km"}) {
    throw std::runtime_error("topology: malformed column header");
  }
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto tok = split_tokens(line);
    if (tok.size() != 3 || tok[0].size() != 1) {
      throw std::runtime_error("topology: malformed node row: '" + line + "'");
    }
    const Point p{parse_double(tok[1]), parse_double(tok[2])};
    switch (tok[0][0]) {
      case 'F':
        topo.rrhs.push_back({p, AdcClass::FullRes});
        break;
      case 'L':
        topo.rrhs.push_back({p, AdcClass::LowRes});
        break;
      case 'U':
        topo.users.push_back(p);
        break;
      default:
        throw std::runtime_error("topology: unknown node kind '" + tok[0] + "'");
    }
  }
  topo.validate();
  return topo;
}

}  // namespace dmimo
