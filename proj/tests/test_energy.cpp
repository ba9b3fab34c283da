#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coversim/energy.hpp"
#include "coversim/profiles.hpp"
#include "coversim/rng.hpp"

using namespace coversim;

namespace {
BatteryModel paper_battery() {
  return BatteryModel::from_mah(50.0, 3.3, 3.0, 4.2, 0.01, 0.20);
}
}  // namespace

TEST_CASE("capacity from mAh rating") {
  CHECK(paper_battery().capacity == pj_from_j(594.0));  // 50 mAh * 3.3 V
}

TEST_CASE("harvest credits power * dt and clamps at capacity") {
  const BatteryModel b = paper_battery();
  EnergyStore s;
  s.soc = s.initial = b.capacity / 2;

  harvest(s, 300, 10 * kSecond, b);  // sunny for 10 s
  CHECK(s.soc - s.initial == pj_from_j(3e-3));

  EnergyStore unchanged = s;
  harvest(s, 300, 0, b);
  CHECK(s.soc == unchanged.soc);
  CHECK(s.harvested == unchanged.harvested);

  EnergyStore full;
  full.soc = full.initial = b.capacity;
  harvest(full, 300, 100 * kSecond, b);
  CHECK(full.soc == b.capacity);
  CHECK(full.wasted == pj_from_j(30e-3));
}

TEST_CASE("drain against the full-pass oracle") {
  const HardwareProfile p = load_profile(std::string(COVERSIM_DATA_DIR) +
                                         "/esp32c3_supermini.profile");
  const Picojoules full_pass = full_pass_energy(p);
  EnergyStore s;
  s.soc = s.initial = pj_from_j(10.0);
  const auto out = drain(s, full_pass);
  CHECK_FALSE(out.depleted);
  CHECK(joules(s.soc) == doctest::Approx(3.93273).epsilon(1e-9));

  EnergyStore t = s;
  CHECK_FALSE(drain(t, 0).depleted);
  CHECK(t.soc == s.soc);

  EnergyStore low;
  low.soc = low.initial = pj_from_j(1.0);
  const auto dep = drain(low, pj_from_j(2.0));
  CHECK(dep.depleted);
  CHECK(dep.shortfall == pj_from_j(1.0));
  CHECK(low.soc == 0);
}

TEST_CASE("voltage proxy endpoints and midpoint") {
  const BatteryModel b = paper_battery();
  EnergyStore s;
  CHECK(voltage_of(s, b) == doctest::Approx(3.0));
  s.soc = b.capacity;
  CHECK(voltage_of(s, b) == doctest::Approx(4.2));
  s.soc = b.capacity / 2;
  CHECK(voltage_of(s, b) == doctest::Approx(3.6));
}

TEST_CASE("voltage round-trips through the state of charge") {
  const BatteryModel b = paper_battery();
  Rng rng = Rng::stream(5, "voltage");
  double prev_v = -1;
  for (int i = 0; i <= 100; ++i) {
    EnergyStore s;
    s.soc = static_cast<Picojoules>(b.capacity * (i / 100.0));
    const double v = voltage_of(s, b);
    CHECK(v > prev_v);  // strictly increasing
    prev_v = v;
    const double frac_back = (v - b.v_min) / (b.v_max - b.v_min);
    CHECK(std::abs(frac_back - s.fraction(b)) < 1e-12);
  }
  (void)rng;
}

TEST_CASE("lifecycle gate thresholds") {
  const BatteryModel b = paper_battery();
  CHECK(lifecycle_gate(0.009, LifecyclePhase::Operational, b) ==
        LifecyclePhase::DeepSleep);
  CHECK(lifecycle_gate(0.15, LifecyclePhase::DeepSleep, b) ==
        LifecyclePhase::DeepSleep);
  CHECK(lifecycle_gate(0.20, LifecyclePhase::DeepSleep, b) ==
        LifecyclePhase::Operational);
  CHECK(lifecycle_gate(0.05, LifecyclePhase::Operational, b) ==
        LifecyclePhase::Operational);
}

TEST_CASE("conservation holds over random harvest/drain sequences") {
  const BatteryModel b = paper_battery();
  Rng rng = Rng::stream(99, "conservation");
  for (int trial = 0; trial < 20; ++trial) {
    EnergyStore s;
    s.soc = s.initial =
        static_cast<Picojoules>(rng.uniform01() * static_cast<double>(b.capacity));
    for (int i = 0; i < 500; ++i) {
      if (rng.uniform01() < 0.5) {
        harvest(s, static_cast<Microwatts>(rng.uniform_int(1000)),
                static_cast<Micros>(rng.uniform_int(100 * kSecond)), b);
      } else {
        drain(s, static_cast<Picojoules>(rng.uniform01() * 1e12));
      }
      CHECK(s.soc >= 0);
      CHECK(s.soc <= b.capacity);
      CHECK(s.soc == s.initial + s.harvested - s.consumed);  // exact
    }
  }
}

TEST_CASE("hysteresis band holds state in both directions") {
  const BatteryModel b = paper_battery();
  Rng rng = Rng::stream(123, "hysteresis");
  // from DeepSleep, fractions below recovery never wake the node
  LifecyclePhase phase = LifecyclePhase::DeepSleep;
  for (int i = 0; i < 10000; ++i) {
    phase = lifecycle_gate(rng.uniform(0.0, 0.1999), phase, b);
    CHECK(phase == LifecyclePhase::DeepSleep);
  }
  // from Operational, fractions at/above lower never sleep it
  phase = LifecyclePhase::Operational;
  for (int i = 0; i < 10000; ++i) {
    phase = lifecycle_gate(rng.uniform(0.01, 1.0), phase, b);
    CHECK(phase == LifecyclePhase::Operational);
  }
}
