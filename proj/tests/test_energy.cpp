#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dmimo/energy.hpp"

using namespace dmimo;

TEST_CASE("per-class power consumption") {
  const PowerModel model{1e-4, 2.0, 12};
  CHECK(power_consumption(1, 1, model) == Catch::Approx(2.0004).epsilon(1e-12));
  CHECK(power_consumption(20, 8, model) ==
        Catch::Approx(171.072).epsilon(1e-12));
  CHECK(power_consumption(0, 3, model) == 0.0);
  CHECK_THROWS_AS(power_consumption(1, 0, model), std::invalid_argument);
  CHECK_THROWS_AS(power_consumption(1, 3, PowerModel{0.0, 2.0, 12}),
                  std::invalid_argument);
}

TEST_CASE("power grows with head count and resolution") {
  const PowerModel model;
  for (int b = 1; b < 12; ++b) {
    CHECK(power_consumption(5, b + 1, model) > power_consumption(5, b, model));
  }
  for (std::size_t m = 0; m < 8; ++m) {
    CHECK(power_consumption(m + 1, 4, model) > power_consumption(m, 4, model));
  }
}

TEST_CASE("energy efficiency arithmetic") {
  CHECK(energy_efficiency(10.0, 1e7, 60.0, 40.0) == Catch::Approx(1e6));
  CHECK(energy_efficiency(10.0, 1e7, 120.0, 80.0) == Catch::Approx(5e5));
  CHECK_THROWS_AS(energy_efficiency(10.0, 1e7, 0.0, 0.0),
                  std::invalid_argument);
}

namespace {

EERecipe small_recipe() {
  EERecipe r;
  r.m_full = 4;
  r.k_users = 3;
  r.rho = 10.0;
  return r;
}

}  // namespace

TEST_CASE("grid search over the low-resolution block") {
  const PowerModel model;
  const std::vector<std::size_t> grid_ml = {0, 5, 10};
  const std::vector<int> grid_b = {1, 2, 4};

  SECTION("zero threshold makes every point feasible") {
    const auto r = optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0,
                                   4, 99);
    REQUIRE(r.points.size() == 9);
    double best_eta = 0.0;
    for (const auto& p : r.points) {
      CHECK(p.feasible);
      best_eta = std::max(best_eta, p.eta_bits_per_joule);
    }
    REQUIRE(r.best.has_value());
    CHECK(r.best->eta_bits_per_joule == best_eta);
  }

  SECTION("an unreachable threshold reports an empty feasible set") {
    const auto r = optimize_config(small_recipe(), model, grid_ml, grid_b,
                                   1e18, 4, 99);
    CHECK_FALSE(r.best.has_value());
    for (const auto& p : r.points) CHECK_FALSE(p.feasible);
  }

  SECTION("eta recomputes exactly from its own columns") {
    const auto r = optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0,
                                   4, 99);
    for (const auto& p : r.points) {
      CHECK(p.eta_bits_per_joule == p.mean_throughput_bps / p.power_w);
    }
  }

  SECTION("results are deterministic") {
    const auto a = optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0,
                                   4, 7);
    const auto b = optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0,
                                   4, 7);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].mean_throughput_bps == b.points[i].mean_throughput_bps);
      CHECK(a.points[i].eta_bits_per_joule == b.points[i].eta_bits_per_joule);
    }
  }

  SECTION("input validation") {
    CHECK_THROWS_AS(optimize_config(small_recipe(), model, {}, grid_b, 0.0, 4, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimize_config(small_recipe(), model, grid_ml, {}, 0.0, 4, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0, 0, 1),
        std::invalid_argument);
  }
}

TEST_CASE("efficiency over resolution rises then falls at most once") {
  const PowerModel model;
  const std::vector<std::size_t> grid_ml = {0, 10, 20};
  const std::vector<int> grid_b = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto r =
      optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0, 8, 5);
  for (std::size_t mi = 0; mi < grid_ml.size(); ++mi) {
    int last_sign = 0;
    int sign_changes = 0;
    for (std::size_t bi = 1; bi < grid_b.size(); ++bi) {
      const double diff =
          r.points[mi * grid_b.size() + bi].eta_bits_per_joule -
          r.points[mi * grid_b.size() + bi - 1].eta_bits_per_joule;
      const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (sign != 0 && last_sign != 0 && sign != last_sign) ++sign_changes;
      if (sign != 0) last_sign = sign;
    }
    CHECK(sign_changes <= 1);
  }
}

TEST_CASE("efficiency peaks at an interior bit depth on the reference recipe") {
  EERecipe recipe;  // 20 full-resolution heads, 20 users
  recipe.rho = 10.0;
  const std::vector<int> grid_b = {1, 2, 3, 4, 5, 6, 7, 8};
  const auto r =
      optimize_config(recipe, PowerModel{}, {40}, grid_b, 0.0, 10, 2);
  std::size_t argmax = 0;
  for (std::size_t bi = 1; bi < grid_b.size(); ++bi) {
    if (r.points[bi].eta_bits_per_joule >
        r.points[argmax].eta_bits_per_joule) {
      argmax = bi;
    }
  }
  CHECK(argmax > 0);
  CHECK(argmax < grid_b.size() - 1);
}

TEST_CASE("throughput along the grid is monotone in the block size") {
  const PowerModel model;
  const std::vector<std::size_t> grid_ml = {0, 5, 10, 20};
  const std::vector<int> grid_b = {2};
  const auto r =
      optimize_config(small_recipe(), model, grid_ml, grid_b, 0.0, 16, 3);
  for (std::size_t mi = 1; mi < grid_ml.size(); ++mi) {
    CHECK(r.points[mi].mean_throughput_bps >
          r.points[mi - 1].mean_throughput_bps);
  }
}

TEST_CASE("surface serialization carries the best point") {
  const auto r = optimize_config(small_recipe(), PowerModel{}, {0, 5}, {1, 2},
                                 0.0, 2, 1);
  std::ostringstream os;
  write_ee_surface(os, r);
  const auto text = os.str();
  CHECK(text.find("m_low bits mean_throughput_bps power_w "
                  "eta_bits_per_joule feasible") != std::string::npos);
  CHECK(text.find("# threshold_bps") != std::string::npos);
  CHECK(text.find("best m_low") != std::string::npos);
}
