#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "coversim/profiles.hpp"

using namespace coversim;

namespace {

const std::string kBundled =
    std::string(COVERSIM_DATA_DIR) + "/esp32c3_supermini.profile";

HardwareProfile bundled() { return load_profile(kBundled); }

BatteryModel paper_battery() {
  return BatteryModel::from_mah(50.0, 3.3, 3.0, 4.2, 0.01, 0.20);
}

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("bundled profile matches the measured tables") {
  const HardwareProfile p = bundled();
  CHECK(p.layer_count() == 5);
  CHECK(p.layers[2].energy == pj_from_uj(1197630));
  CHECK(p.layers[2].latency == micros_from_ms(2400));
  CHECK(p.tx[3].energy == pj_from_uj(23596));
  CHECK(p.tx[3].payload_bytes == 160);
  CHECK(p.idle_power == 434850);  // uW

  // payloads line up with the producing layer's output size
  for (int k = 0; k < p.layer_count(); ++k)
    CHECK(p.tx[static_cast<std::size_t>(k)].payload_bytes ==
          p.layers[static_cast<std::size_t>(k)].output_bytes);
}

TEST_CASE("energy_of lookups") {
  const HardwareProfile p = bundled();
  const FrameCosts f = build_frame_costs(p, FrameParams{});

  CHECK(energy_of(p, f, {EnergyOp::Kind::Infer, 0, "", 4}) ==
        pj_from_uj(1901280));  // 1.90128 J
  CHECK(energy_of(p, f, {EnergyOp::Kind::Idle, kSecond, "", 0}) ==
        pj_from_j(0.43485));
  CHECK(energy_of(p, f, {EnergyOp::Kind::Sense, 0, "ultrasonic", 0}) == 0);
  CHECK(energy_of(p, f, {EnergyOp::Kind::Sense, 3 * kSecond, "ultrasonic", 0}) ==
        pj_from_uj(1348970));

  // pure lookup: identical arguments, identical values
  const EnergyOp op{EnergyOp::Kind::TxLayerOutput, 0, "", 2};
  CHECK(energy_of(p, f, op) == energy_of(p, f, op));

  CHECK_THROWS_AS(energy_of(p, f, {EnergyOp::Kind::Infer, 0, "", 9}),
                  ProfileError);
  CHECK_THROWS_AS(energy_of(p, f, {EnergyOp::Kind::Sense, 1, "sonar", 0}),
                  ProfileError);
}

TEST_CASE("full-pass energy equals the layer column sum") {
  const HardwareProfile p = bundled();
  Picojoules oracle = 0;  // independent sum over the loaded rows
  for (const auto& l : p.layers) oracle += l.energy;
  CHECK(full_pass_energy(p) == oracle);
  CHECK(full_pass_energy(p) == pj_from_uj(6067270));

  HardwareProfile zeroed = p;
  for (auto& l : zeroed.layers) l.energy = 0;
  CHECK(full_pass_energy(zeroed) == 0);

  HardwareProfile single = p;
  single.layers.resize(1);
  CHECK(full_pass_energy(single) == p.layers[0].energy);
}

TEST_CASE("frame costs derive from the cheapest measured density") {
  const HardwareProfile p = bundled();
  const FrameCosts f = build_frame_costs(p, FrameParams{});
  CHECK(p.cheapest_density() == doctest::Approx(61.39));
  CHECK(f.beacon_energy == pj_from_uj(16 * 61.39));   // ~982 uJ
  CHECK(f.result_energy == pj_from_uj(8 * 61.39));    // ~491 uJ
  CHECK(f.raw_bytes == 400);
  CHECK(f.raw_energy == p.tx[0].energy);  // matches the measured 400 B row
  CHECK(f.raw_airtime == p.tx[0].airtime);
}

TEST_CASE("split map cumulative costs") {
  const HardwareProfile p = bundled();
  const FrameCosts f = build_frame_costs(p, FrameParams{});
  const SplitMap m = build_split_map(p, f, paper_battery());

  CHECK(m.energy[0] == pj_from_uj(24555));                  // raw forward only
  CHECK(m.energy[1] == pj_from_uj(577770 + 24555));         // infer 0 + tx 0
  CHECK(m.energy[1] == pj_from_uj(602325));
  CHECK(m.v_req[5] > m.v_req[1]);
  for (int L = 1; L < SplitMap::kMaxLayers; ++L) {
    CHECK(m.energy[L + 1] > m.energy[L]);
    CHECK(m.v_req[L + 1] > m.v_req[L]);
  }

  // incremental costs against a direct sum
  for (int from = 0; from <= 5; ++from) {
    for (int to = from; to <= 5; ++to) {
      Picojoules want = 0;
      for (int k = from; k < to; ++k) want += p.layers[k].energy;
      if (to == 5)
        want += f.result_energy;
      else if (to == 0)
        want += f.raw_energy;
      else
        want += p.tx[to - 1].energy;
      CHECK(m.cost_between(from, to) == want);
    }
  }
}

TEST_CASE("serialize then reload reproduces the profile") {
  const HardwareProfile p = bundled();
  const std::string path = write_temp("coversim_roundtrip.profile",
                                      serialize_profile(p));
  const HardwareProfile q = load_profile(path);
  CHECK(q.idle_power == p.idle_power);
  REQUIRE(q.layers.size() == p.layers.size());
  REQUIRE(q.tx.size() == p.tx.size());
  REQUIRE(q.sensors.size() == p.sensors.size());
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    CHECK(q.layers[i].energy == p.layers[i].energy);
    CHECK(q.layers[i].latency == p.layers[i].latency);
    CHECK(q.layers[i].flops == p.layers[i].flops);
    CHECK(q.layers[i].output_bytes == p.layers[i].output_bytes);
  }
  for (std::size_t i = 0; i < p.tx.size(); ++i) {
    CHECK(q.tx[i].energy == p.tx[i].energy);
    CHECK(q.tx[i].airtime == p.tx[i].airtime);
    CHECK(q.tx[i].payload_bytes == p.tx[i].payload_bytes);
  }
  for (std::size_t i = 0; i < p.sensors.size(); ++i) {
    CHECK(q.sensors[i].name == p.sensors[i].name);
    CHECK(q.sensors[i].window_energy == p.sensors[i].window_energy);
  }
  std::remove(path.c_str());
}

TEST_CASE("malformed profiles are rejected with the offending row") {
  const std::string good =
      "[idle]\npower_mw\n434.85\n"
      "[layers]\nlayer flops latency_ms energy_uj power_mw output_bytes\n"
      "0 100 10 1000 0.1 400\n"
      "[tx]\nsource_layer payload_bytes time_ms power_mw energy_uj "
      "density_uj_per_byte\n0 400 30.5 838.25 24555 61.39\n"
      "[sensors]\nname power_mw energy_3s_uj\nultrasonic 449.66 1348970\n";

  SUBCASE("negative energy names the row") {
    std::string bad = good;
    bad.replace(bad.find("0 100 10 1000"), 13, "0 100 10 -500");
    const std::string path = write_temp("coversim_bad1.profile", bad);
    bool threw = false;
    try {
      load_profile(path);
    } catch (const ProfileError& e) {
      threw = true;
      CHECK(std::string(e.what()).find(":6:") != std::string::npos);
    }
    CHECK(threw);
    std::remove(path.c_str());
  }
  SUBCASE("density inconsistent with energy") {
    std::string bad = good;
    bad.replace(bad.find("24555 61.39"), 11, "24555 99.99");
    const std::string path = write_temp("coversim_bad2.profile", bad);
    CHECK_THROWS_AS(load_profile(path), ProfileError);
    std::remove(path.c_str());
  }
  SUBCASE("payload must match the layer output size") {
    std::string bad = good;
    bad.replace(bad.find("0 400 30.5"), 10, "0 320 30.5");
    bad.replace(bad.find("24555 61.39"), 11, "24555 76.73");
    const std::string path = write_temp("coversim_bad3.profile", bad);
    CHECK_THROWS_AS(load_profile(path), ProfileError);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_profile("/tmp/does_not_exist.profile"), ProfileError);
  }
  SUBCASE("the template itself loads") {
    const std::string path = write_temp("coversim_good.profile", good);
    HardwareProfile p = load_profile(path);
    CHECK(p.layer_count() == 1);
    std::remove(path.c_str());
  }
}
