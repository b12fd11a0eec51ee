#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dmimo/topology.hpp"

using namespace dmimo;

TEST_CASE("generate_topology produces the requested layout") {
  const auto topo = generate_topology(1.0, 20, 80, 20, 0.05, 7);
  CHECK(topo.m_total() == 100);
  CHECK(topo.m_full() == 20);
  CHECK(topo.m_low() == 80);
  CHECK(topo.k_users() == 20);
  REQUIRE_NOTHROW(topo.validate());

  double min_dist = 1e9;
  for (const auto& r : topo.rrhs) {
    for (const auto& u : topo.users) {
      min_dist = std::min(min_dist, distance_km(r.position, u));
    }
  }
  CHECK(min_dist >= 0.05);
}

TEST_CASE("degenerate single-pair layout without guard") {
  const auto topo = generate_topology(1.0, 1, 0, 1, 0.0, 0);
  CHECK(topo.m_total() == 1);
  CHECK(topo.k_users() == 1);
  REQUIRE_NOTHROW(topo.validate());
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate_topology(1.0, 10, 10, 5, 0.05, 42);
  const auto b = generate_topology(1.0, 10, 10, 5, 0.05, 42);
  CHECK(a == b);

  std::ostringstream sa, sb;
  write_topology(sa, a);
  write_topology(sb, b);
  CHECK(sa.str() == sb.str());

  const auto c = generate_topology(1.0, 10, 10, 5, 0.05, 43);
  CHECK_FALSE(a == c);
}

TEST_CASE("guard constraint holds across many seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto topo = generate_topology(0.5, 3, 5, 4, 0.03, seed);
    const auto dist = pairwise_distances(topo);
    for (double d : dist.d_km.data()) {
      REQUIRE(d >= 0.03);
    }
  }
}

TEST_CASE("growing the low-resolution block keeps earlier draws") {
  const auto small = generate_topology(1.0, 4, 2, 3, 0.05, 11);
  const auto big = generate_topology(1.0, 4, 6, 3, 0.05, 11);
  for (std::size_t m = 0; m < small.m_total(); ++m) {
    CHECK(big.rrhs[m].position == small.rrhs[m].position);
  }
}

TEST_CASE("generate_topology rejects bad parameters") {
  CHECK_THROWS_AS(generate_topology(1.0, 0, 0, 5, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(1.0, 5, 0, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(0.0, 5, 0, 5, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(1.0, 5, 0, 5, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_topology(1.0, 5, 0, 5, -0.1, 1), std::invalid_argument);
}

TEST_CASE("infeasible guard constraint fails after the redraw cap") {
  // 60 RRHs with 0.49 km discs blanket the whole square.
  CHECK_THROWS_AS(generate_topology(1.0, 30, 30, 1, 0.49, 3),
                  std::runtime_error);
}

TEST_CASE("pairwise distances are Euclidean") {
  NetworkTopology topo;
  topo.area_side_km = 5.0;
  topo.guard_radius_km = 0.0;
  topo.rrhs = {{{0.0, 0.0}, AdcClass::FullRes}};
  topo.users = {{3.0, 4.0}};
  const auto dist = pairwise_distances(topo);
  CHECK(dist.d_km(0, 0) == Catch::Approx(5.0));
  CHECK(dist.m_full == 1);
}

TEST_CASE("coincident RRH and user give zero distance") {
  NetworkTopology topo;
  topo.area_side_km = 1.0;
  topo.guard_radius_km = 0.0;
  topo.rrhs = {{{0.5, 0.5}, AdcClass::FullRes}};
  topo.users = {{0.5, 0.5}};
  const auto dist = pairwise_distances(topo);
  CHECK(dist.d_km(0, 0) == 0.0);
}

TEST_CASE("collocate moves every RRH to the center and is idempotent") {
  const auto topo = generate_topology(1.0, 6, 10, 4, 0.05, 5);
  const auto c = collocate(topo);
  for (const auto& r : c.rrhs) {
    CHECK(r.position == Point{0.5, 0.5});
  }
  CHECK(c.users == topo.users);
  CHECK(c.m_full() == topo.m_full());
  CHECK(c.m_low() == topo.m_low());
  CHECK(collocate(c) == c);

  // constant distance columns
  const auto dist = pairwise_distances(c);
  for (std::size_t k = 0; k < c.k_users(); ++k) {
    for (std::size_t m = 1; m < c.m_total(); ++m) {
      CHECK(dist.d_km(m, k) == dist.d_km(0, k));
    }
  }
}

TEST_CASE("topology serialization round-trips losslessly") {
  for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
    const auto topo = generate_topology(2.0, 3, 4, 5, 0.02, seed);
    std::stringstream ss;
    write_topology(ss, topo);
    const auto back = read_topology(ss);
    CHECK(back == topo);
  }
}

TEST_CASE("read_topology rejects malformed input") {
  std::istringstream missing_header("F 0.1 0.2\n");
  CHECK_THROWS(read_topology(missing_header));

  std::istringstream bad_kind(
      "# area_side_km 1 guard_radius_km 0\nkind x_km y_km\nQ 0.1 0.2\n");
  CHECK_THROWS(read_topology(bad_kind));

  std::istringstream bad_order(
      "# area_side_km 1 guard_radius_km 0\nkind x_km y_km\n"
      "L 0.1 0.2\nF 0.3 0.4\nU 0.5 0.5\n");
  CHECK_THROWS_AS(read_topology(bad_order), std::invalid_argument);
}

TEST_CASE("validate flags out-of-area and guard violations") {
  NetworkTopology topo;
  topo.area_side_km = 1.0;
  topo.guard_radius_km = 0.2;
  topo.rrhs = {{{0.5, 0.5}, AdcClass::FullRes}};
  topo.users = {{0.5, 0.6}};  // 0.1 km away, inside the guard
  CHECK_THROWS_AS(topo.validate(), std::invalid_argument);

  topo.guard_radius_km = 0.0;
  topo.users = {{1.5, 0.5}};
  CHECK_THROWS_AS(topo.validate(), std::invalid_argument);
}
