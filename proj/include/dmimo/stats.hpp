#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dmimo/tabular.hpp"

namespace dmimo {

/// Empirical CDF of a sample set. Values ascend; level of values[i] is
/// (i+1)/n.
struct CdfTable {
  std::vector<double> values;
  std::vector<double> levels;

  /// Lower-interpolated quantile: the sample at rank ceil(q*n) (1-based).
  double percentile_lower(double q) const {
    if (values.empty()) {
      throw std::invalid_argument("percentile_lower: empty table");
    }
    if (!(q > 0.0) || q > 1.0) {
      throw std::invalid_argument("percentile_lower: q must lie in (0, 1]");
    }
    const double n = static_cast<double>(values.size());
    // tiny slack keeps exact rank boundaries from rounding up
    const auto rank = static_cast<std::size_t>(
        std::max(1.0, std::ceil(q * n - 1e-9)));
    return values[rank - 1];
  }

  /// 95%-likely value: the level all but the worst 5% of samples exceed.
  double p95_likely() const { return percentile_lower(0.05); }
};

inline CdfTable compute_cdf(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("compute_cdf: empty sample set");
  }
  std::sort(samples.begin(), samples.end());
  CdfTable t;
  t.levels.resize(samples.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t.levels[i] = static_cast<double>(i + 1) / n;
  }
  t.values = std::move(samples);
  return t;
}

inline void write_cdf(std::ostream& os, const CdfTable& t) {
  os << "# samples " << t.values.size() << " p95_likely "
     << format_full(t.p95_likely()) << "\n";
  os << "value cdf\n";
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    os << format_full(t.values[i]) << ' ' << format_full(t.levels[i]) << "\n";
  }
}

}  // namespace dmimo
