#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dmimo/quantization.hpp"

using namespace dmimo;

namespace {

// Test-only brute-force design of the 4-level MMSE quantizer: symmetric
// levels +/-y1, +/-y2, nearest-level assignment, distortion by Simpson
// quadrature. Independent of the library's fixed-point/closed-cell route.
double simpson_distortion_b2(double y1, double y2, int intervals) {
  const double hi = 10.0;
  const double h = hi / intervals;
  auto integrand = [&](double x) {
    const double d1 = (x - y1) * (x - y1);
    const double d2 = (x - y2) * (x - y2);
    return std::min(d1, d2) * std::exp(-0.5 * x * x) /
           std::sqrt(2.0 * std::numbers::pi);
  };
  double acc = integrand(0.0) + integrand(hi);
  for (int i = 1; i < intervals; ++i) {
    acc += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return 2.0 * acc * h / 3.0;  // both half-axes by symmetry
}

double brute_force_alpha_b2() {
  double best_y1 = 0.5, best_y2 = 2.0, best_d = 1e9;
  double span1 = 0.4, span2 = 1.0;
  for (int round = 0; round < 6; ++round) {
    const double lo1 = best_y1 - span1, lo2 = best_y2 - span2;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double y1 = lo1 + 2.0 * span1 * i / 40.0;
        const double y2 = lo2 + 2.0 * span2 * j / 40.0;
        if (!(0.0 < y1 && y1 < y2)) continue;
        const double d = simpson_distortion_b2(y1, y2, 2000);
        if (d < best_d) {
          best_d = d;
          best_y1 = y1;
          best_y2 = y2;
        }
      }
    }
    span1 /= 8.0;
    span2 /= 8.0;
  }
  return 1.0 - simpson_distortion_b2(best_y1, best_y2, 40000);
}

}  // namespace

TEST_CASE("one-bit gain equals 2/pi") {
  CHECK(std::abs(lloyd_max_alpha(1) - 2.0 / std::numbers::pi) < 1e-10);
}

TEST_CASE("two-bit gain matches the brute-force design") {
  // brute-force oracle gives 0.882518; frozen from a converged run
  const double oracle = brute_force_alpha_b2();
  CHECK(oracle == Catch::Approx(0.8825181521).margin(2e-6));
  CHECK(lloyd_max_alpha(2) == Catch::Approx(oracle).margin(2e-6));
  CHECK(lloyd_max_alpha(2) == Catch::Approx(0.8825181521).margin(1e-9));
}

TEST_CASE("high resolution approaches but never reaches 1") {
  CHECK(lloyd_max_alpha(12) > 0.9999);
  for (int b = 1; b <= 16; ++b) {
    CHECK(lloyd_max_alpha(b) < 1.0);
  }
}

TEST_CASE("gain increases strictly with resolution") {
  for (int b = 1; b < 12; ++b) {
    CHECK(lloyd_max_alpha(b + 1) > lloyd_max_alpha(b));
  }
}

TEST_CASE("distortion shrinks about fourfold per bit in the high-rate regime") {
  for (int b = 4; b <= 11; ++b) {
    const double ratio =
        (1.0 - lloyd_max_alpha(b)) / (1.0 - lloyd_max_alpha(b + 1));
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("lloyd_max_alpha rejects out-of-range bit depths") {
  CHECK_THROWS_AS(lloyd_max_alpha(0), std::invalid_argument);
  CHECK_THROWS_AS(lloyd_max_alpha(17), std::invalid_argument);
}

TEST_CASE("quantizer spec ties full resolution to alpha 1") {
  const auto full = QuantizerSpec::full_resolution();
  CHECK(full.is_full_res());
  CHECK(full.alpha == 1.0);
  const auto b3 = QuantizerSpec::from_bits(3);
  CHECK_FALSE(b3.is_full_res());
  CHECK(b3.alpha < 1.0);
  CHECK(b3.alpha > 0.0);
}

TEST_CASE("quantization-noise covariance diagonal") {
  SECTION("full resolution kills quantization noise") {
    const ComplexMatrix g(2, 3, {1.0, -0.5});
    const auto cov = quant_noise_cov(g, g, 1.0, 5.0);
    for (double d : cov.diag) CHECK(d == 0.0);
  }

  SECTION("noise-only input gives alpha(1-alpha)") {
    const ComplexMatrix g(2, 3, {0.7, 0.1});
    const auto cov = quant_noise_cov(g, g, 0.25, 0.0);
    for (double d : cov.diag) CHECK(d == Catch::Approx(0.25 * 0.75));
  }

  SECTION("single entry with |g|^2 = 2") {
    ComplexMatrix g(1, 1, std::sqrt(2.0));
    const auto cov = quant_noise_cov(g, g, 0.5, 1.0);
    REQUIRE(cov.diag.size() == 1);
    CHECK(cov.diag[0] == Catch::Approx(0.75));
  }

  SECTION("shape mismatch throws") {
    CHECK_THROWS_AS(quant_noise_cov(ComplexMatrix(1, 2), ComplexMatrix(2, 1),
                                    0.5, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("apply_aqnm at full resolution is a bit-exact passthrough") {
  const std::vector<std::complex<double>> y = {{0.3, -0.7}, {1e-17, 42.0}};
  QuantNoiseCov cov;
  cov.diag = {0.0, 0.0};
  const auto out = apply_aqnm(y, cov, 1.0, 123);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == y[0]);
  CHECK(out[1] == y[1]);
}

TEST_CASE("apply_aqnm is deterministic and checks lengths") {
  QuantNoiseCov cov;
  cov.diag = {0.5, 0.5};
  const std::vector<std::complex<double>> y = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK(apply_aqnm(y, cov, 0.5, 7) == apply_aqnm(y, cov, 0.5, 7));
  QuantNoiseCov short_cov;
  short_cov.diag = {0.5};
  CHECK_THROWS_AS(apply_aqnm(y, short_cov, 0.5, 7), std::invalid_argument);
}

TEST_CASE("quantization noise has the declared variance") {
  // y = 0, alpha = 0.5, rho = 0: per-entry variance alpha(1-alpha) = 0.25
  const ComplexMatrix g(1, 1, 1.0);
  const auto cov = quant_noise_cov(g, g, 0.5, 0.0);
  const std::vector<std::complex<double>> y = {{0.0, 0.0}};
  NeumaierSum p;
  const std::size_t trials = 100000;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto out = apply_aqnm(y, cov, 0.5, derive_seed(91, t));
    p.add(std::norm(out[0]));
  }
  const double var = p.value() / static_cast<double>(trials);
  CHECK(var == Catch::Approx(0.25).epsilon(0.02));
}

TEST_CASE("residual covariance matches the model diagonally") {
  // fixed small realization: 3 L-RRHs, 2 users
  ComplexMatrix g(3, 2);
  g(0, 0) = {0.9, 0.1};  g(0, 1) = {-0.3, 0.4};
  g(1, 0) = {0.2, -1.1}; g(1, 1) = {0.6, 0.0};
  g(2, 0) = {-0.5, 0.5}; g(2, 1) = {0.1, 0.9};
  const double alpha = 0.6366;
  const auto cov = quant_noise_cov(g, g, alpha, 2.0);
  const std::vector<std::complex<double>> y = {{1.0, -2.0}, {0.5, 0.5}, {-1.5, 0.0}};

  const std::size_t trials = 100000;
  Matrix<std::complex<double>> cross(3, 3);
  RealMatrix pow_sq(3, 1);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto out = apply_aqnm(y, cov, alpha, derive_seed(17, t));
    std::vector<std::complex<double>> w(3);
    for (std::size_t i = 0; i < 3; ++i) w[i] = out[i] - alpha * y[i];
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        cross(i, j) += w[i] * std::conj(w[j]);
      }
      pow_sq(i, 0) += std::norm(w[i]) * std::norm(w[i]);
    }
  }
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < 3; ++i) {
    const double mean = cross(i, i).real() / n;
    const double var = pow_sq(i, 0) / n - mean * mean;
    const double std_err = std::sqrt(var / n);
    CHECK(std::abs(mean - cov.diag[i]) <= 3.0 * std_err);
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double std_err_off = std::sqrt(cov.diag[i] * cov.diag[j] / n);
      CHECK(std::abs(cross(i, j) / n) <= 3.0 * std_err_off);
    }
  }
}

TEST_CASE("quantization noise is uncorrelated with the quantizer input") {
  const ComplexMatrix g(2, 2, {0.8, -0.2});
  const auto cov = quant_noise_cov(g, g, 0.8825, 1.0);
  const std::size_t trials = 100000;
  std::complex<double> cross0 = 0.0, cross1 = 0.0;
  NeumaierSum y_pow;
  auto y_rng = make_engine(2718);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<std::complex<double>> y(2);
    fill_complex_gaussian(y, 2.0, y_rng);
    const auto out = apply_aqnm(y, cov, 0.8825, derive_seed(314, t));
    cross0 += (out[0] - 0.8825 * y[0]) * std::conj(y[0]);
    cross1 += (out[1] - 0.8825 * y[1]) * std::conj(y[1]);
    y_pow.add(std::norm(y[0]));
  }
  const double n = static_cast<double>(trials);
  // Var(w conj(y)) = E|w|^2 E|y|^2; three-sigma band around zero
  const double band0 = 3.0 * std::sqrt(cov.diag[0] * (y_pow.value() / n) / n);
  CHECK(std::abs(cross0 / n) <= band0);
  const double band1 = 3.0 * std::sqrt(cov.diag[1] * (y_pow.value() / n) / n);
  CHECK(std::abs(cross1 / n) <= band1);
}

TEST_CASE("alpha table matches the committed fixture") {
  std::ostringstream generated;
  write_alpha_table(generated, 1, 12);

  std::ifstream fixture(std::string(DMIMO_TEST_DATA_DIR) + "/alpha_table.txt",
                        std::ios::binary);
  REQUIRE(fixture.good());
  std::stringstream committed;
  committed << fixture.rdbuf();
  CHECK(generated.str() == committed.str());
}
