#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coversim/rng.hpp"
#include "coversim/world.hpp"

using namespace coversim;

TEST_CASE("hex grid spacing") {
  SUBCASE("100 nodes at 20 m") {
    const auto pos = build_hex_grid(100, 20.0);
    REQUIRE(pos.size() == 100);
    double min_dist = 1e18;
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = i + 1; j < pos.size(); ++j)
        min_dist = std::min(min_dist, distance(pos[i], pos[j]));
    CHECK(min_dist == doctest::Approx(20.0).epsilon(1e-9));
  }
  SUBCASE("single node sits at the origin") {
    const auto pos = build_hex_grid(1, 20.0);
    REQUIRE(pos.size() == 1);
    CHECK(pos[0].x == 0.0);
    CHECK(pos[0].y == 0.0);
  }
  SUBCASE("three nodes are mutually 20 m apart") {
    const auto pos = build_hex_grid(3, 20.0);
    REQUIRE(pos.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        CHECK(distance(pos[i], pos[j]) == doctest::Approx(20.0).epsilon(1e-9));
  }
  SUBCASE("every node has a neighbor at exactly the spacing") {
    const auto pos = build_hex_grid(60, 15.0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      double nearest = 1e18;
      for (std::size_t j = 0; j < pos.size(); ++j)
        if (j != i) nearest = std::min(nearest, distance(pos[i], pos[j]));
      CHECK(nearest == doctest::Approx(15.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("environment assignment is an exact seeded split") {
  Rng rng = Rng::stream(42, "env");
  const auto env = assign_env(100, 0.5, 300, 50, rng);
  int sunny = 0;
  for (const auto& e : env) sunny += e.kind == EnvKind::Sunny ? 1 : 0;
  CHECK(sunny == 50);
  for (const auto& e : env)
    CHECK(e.harvest_power == (e.kind == EnvKind::Sunny ? 300 : 50));

  Rng rng2 = Rng::stream(42, "env");
  const auto env2 = assign_env(100, 0.5, 300, 50, rng2);
  for (std::size_t i = 0; i < env.size(); ++i)
    CHECK(env[i].kind == env2[i].kind);

  Rng rng3 = Rng::stream(42, "env");
  const auto all = assign_env(10, 1.0, 300, 50, rng3);
  for (const auto& e : all) CHECK(e.kind == EnvKind::Sunny);
}

TEST_CASE("event process") {
  const auto pos = build_hex_grid(100, 20.0);
  const Region region = Region::bounding(pos, 1.0);

  SUBCASE("Poisson mean over 100 seeds within 3 of 138.9") {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      Rng rng = Rng::stream(seed, "world/events");
      total += static_cast<double>(
          gen_events(50.0, 10000 * kSecond, 5 * kSecond, region, rng).size());
    }
    CHECK(std::abs(total / 100.0 - 138.9) < 3.0);
  }
  SUBCASE("degenerate inputs") {
    Rng rng = Rng::stream(1, "events");
    CHECK(gen_events(0.0, 10000 * kSecond, 5 * kSecond, region, rng).empty());
    CHECK(gen_events(50.0, 0, 5 * kSecond, region, rng).empty());
  }
  SUBCASE("times sorted, positions inside the region") {
    Rng rng = Rng::stream(9, "events");
    const auto events = gen_events(50.0, 10000 * kSecond, 5 * kSecond, region, rng);
    for (std::size_t i = 1; i < events.size(); ++i)
      CHECK(events[i - 1].time <= events[i].time);
    for (const auto& e : events) {
      CHECK(e.time >= 0);
      CHECK(e.time <= 10000 * kSecond);
      CHECK(e.position.x >= region.min_x);
      CHECK(e.position.x <= region.max_x);
      CHECK(e.position.y >= region.min_y);
      CHECK(e.position.y <= region.max_y);
    }
  }
  SUBCASE("fixed-count mode") {
    Rng rng = Rng::stream(2, "events");
    const auto events =
        gen_events(50.0, 10000 * kSecond, 5 * kSecond, region, rng, true);
    CHECK(events.size() == 139);  // round(50 * 10000 / 3600)
  }
}

TEST_CASE("coverage fraction") {
  const auto pos = build_hex_grid(100, 20.0);
  const Region region = Region::bounding(pos, 1.0);

  SUBCASE("no sensing nodes") {
    CHECK(coverage_fraction({}, 20.0, region) == 0.0);
  }
  SUBCASE("all nodes sensing covers the hull") {
    const double c = coverage_fraction(pos, 20.0, region);
    CHECK(c >= 1.0 - 1.0 / static_cast<double>(region.cell_count()));
  }
  SUBCASE("single disk in a large region approximates pi r^2") {
    std::vector<Position> corners{{0, 0}, {200, 200}};
    const Region big = Region::bounding(corners, 1.0);
    std::vector<Position> center{{100, 100}};
    const double want = M_PI * 400.0 / big.area();
    CHECK(coverage_fraction(center, 20.0, big) ==
          doctest::Approx(want).epsilon(0.02));
  }
  SUBCASE("monotone under adding sensing nodes and bounded by [0,1]") {
    Rng rng = Rng::stream(31, "coverage");
    std::vector<Position> sensing;
    double prev = 0.0;
    for (int i = 0; i < 30; ++i) {
      sensing.push_back(pos[rng.uniform_int(pos.size())]);
      const double c = coverage_fraction(sensing, 20.0, region);
      CHECK(c >= prev);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
  }
  SUBCASE("raster convergence: halving the cell size moves coverage < 1 pp") {
    Rng rng = Rng::stream(77, "raster");
    std::vector<Position> sensing;
    for (int i = 0; i < 20; ++i) sensing.push_back(pos[rng.uniform_int(pos.size())]);
    const Region fine = Region::bounding(pos, 0.5);
    const double c1 = coverage_fraction(sensing, 20.0, region);
    const double c2 = coverage_fraction(sensing, 20.0, fine);
    CHECK(std::abs(c1 - c2) < 0.01);
  }
  SUBCASE("precomputed raster agrees with the direct scan") {
    const CoverageRaster raster(region, pos, 20.0);
    Rng rng = Rng::stream(13, "raster-agree");
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<int> ids;
      std::vector<Position> subset;
      for (int i = 0; i < 100; ++i) {
        if (rng.uniform01() < 0.2) {
          ids.push_back(i);
          subset.push_back(pos[static_cast<std::size_t>(i)]);
        }
      }
      CHECK(raster.fraction(ids) ==
            doctest::Approx(coverage_fraction(subset, 20.0, region))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("event capture rules") {
  std::vector<Position> pos{{0, 0}, {5, 0}, {12, 0}, {100, 100}};
  AcousticEvent event;
  event.time = 102 * kSecond;
  event.duration = 5 * kSecond;
  event.position = {0, 0};
  const Micros overlap = kSecond / 2;

  SUBCASE("sensing node in range and time captures") {
    std::vector<std::vector<Interval>> logs(4);
    logs[1] = {{100 * kSecond, 110 * kSecond}};  // node 1 at 5 m
    const auto got = event_captured(event, logs, pos, 20.0, overlap);
    REQUIRE(got.has_value());
    CHECK(*got == 1);
  }
  SUBCASE("all nodes asleep") {
    std::vector<std::vector<Interval>> logs(4);
    CHECK_FALSE(event_captured(event, logs, pos, 20.0, overlap).has_value());
  }
  SUBCASE("nearest qualifying node wins") {
    std::vector<std::vector<Interval>> logs(4);
    logs[1] = {{100 * kSecond, 110 * kSecond}};  // 5 m
    logs[2] = {{100 * kSecond, 110 * kSecond}};  // 12 m
    const auto got = event_captured(event, logs, pos, 20.0, overlap);
    REQUIRE(got.has_value());
    CHECK(*got == 1);
  }
  SUBCASE("overlap must reach the threshold") {
    std::vector<std::vector<Interval>> logs(4);
    logs[0] = {{106 * kSecond + 800 * kMillisecond, 120 * kSecond}};  // 0.2 s
    CHECK_FALSE(event_captured(event, logs, pos, 20.0, overlap).has_value());
    logs[0] = {{106 * kSecond, 120 * kSecond}};  // 1.0 s overlap
    CHECK(event_captured(event, logs, pos, 20.0, overlap).has_value());
  }
  SUBCASE("out-of-range sensing does not capture") {
    std::vector<std::vector<Interval>> logs(4);
    logs[3] = {{0, 1000 * kSecond}};  // 141 m away
    CHECK_FALSE(event_captured(event, logs, pos, 20.0, overlap).has_value());
  }
}
