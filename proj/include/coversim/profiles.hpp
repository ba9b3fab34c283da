#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "coversim/energy.hpp"
#include "coversim/units.hpp"

// Hardware power-profiling tables for the ESP32-C3-class node: per-layer
// inference cost, per-layer transmission cost, sensor power, idle draw.
// Loaded from a sectioned text file and immutable afterwards; the split
// map derived from them drives the offloading decision.

namespace coversim {

struct LayerCost {
  int layer_index = 0;
  std::int64_t flops = 0;
  Micros latency = 0;
  Picojoules energy = 0;
  double avg_power_mw = 0.0;
  std::int64_t output_bytes = 0;
};

struct TxCost {
  int source_layer = 0;  // transmits the output of this layer
  std::int64_t payload_bytes = 0;
  Micros airtime = 0;
  double avg_power_mw = 0.0;
  Picojoules energy = 0;
  double density_uj_per_byte = 0.0;
};

struct SensorCost {
  std::string name;
  double avg_power_mw = 0.0;
  Picojoules window_energy = 0;  // measured over `window`
  Micros window = 3 * kSecond;
};

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HardwareProfile {
  Microwatts idle_power = 0;
  std::vector<LayerCost> layers;
  std::vector<TxCost> tx;
  std::vector<SensorCost> sensors;

  int layer_count() const { return static_cast<int>(layers.size()); }

  const LayerCost& layer(int k) const;
  const TxCost& tx_for_layer_output(int k) const;
  const SensorCost& sensor(const std::string& name) const;

  Picojoules idle_energy(Micros dt) const { return idle_power * dt; }
  // Scales the measured window energy, so sense(sensor, window) reproduces
  // the table value exactly.
  Picojoules sense_energy(const SensorCost& s, Micros dt) const {
    return muldiv_floor(s.window_energy, dt, s.window);
  }
  Picojoules infer_energy(int k) const { return layer(k).energy; }
  Micros infer_latency(int k) const { return layer(k).latency; }

  double cheapest_density() const;
};

// Frame costs not measured in the appendix tables: beacons, the final
// result frame, and the raw-audio payload of an L=0 offload. Sized by
// config and priced at the cheapest measured energy density unless the
// payload matches a profiled row exactly.
struct FrameParams {
  std::int64_t raw_payload_bytes = 400;
  std::int64_t beacon_bytes = 16;
  std::int64_t result_bytes = 8;
  Micros beacon_airtime = 5 * kMillisecond;
  Micros result_airtime = 5 * kMillisecond;
};

struct FrameCosts {
  std::int64_t raw_bytes = 0;
  Picojoules raw_energy = 0;
  Micros raw_airtime = 0;
  std::int64_t beacon_bytes = 0;
  Picojoules beacon_energy = 0;
  Micros beacon_airtime = 0;
  std::int64_t result_bytes = 0;
  Picojoules result_energy = 0;
  Micros result_airtime = 0;
};

FrameCosts build_frame_costs(const HardwareProfile& profile,
                             const FrameParams& params);

// Cumulative local-execution energy table. energy[L] is the cost of
// running layers 0..L-1 locally plus transmitting what leaves the node
// afterwards (raw payload for L=0, layer L-1's output tensor for
// 1<=L<=4, the result frame for L=5). v_req[L] is the same cost as a
// voltage-proxy drop.
struct SplitMap {
  static constexpr int kMaxLayers = 5;
  std::array<Picojoules, kMaxLayers + 1> energy{};
  std::array<double, kMaxLayers + 1> v_req{};
  std::array<Picojoules, kMaxLayers + 1> infer_prefix{};  // sum of layers 0..L-1
  std::array<Picojoules, kMaxLayers> tx_out{};            // tx of layer k output
  Picojoules raw_tx = 0;
  Picojoules result_tx = 0;
  double volts_per_pj = 0.0;

  // Incremental cost of taking a task from `from` completed layers to
  // `to`, including the exit transmission. from == to is a pure forward.
  Picojoules cost_between(int from, int to) const;
  double v_req_between(int from, int to) const {
    return static_cast<double>(cost_between(from, to)) * volts_per_pj;
  }
};

HardwareProfile load_profile(const std::string& path);

// Table-backed energy lookup for one operation kind.
struct EnergyOp {
  enum class Kind { Idle, Sense, Infer, TxLayerOutput, TxBeacon, TxRaw, TxResult };
  Kind kind = Kind::Idle;
  Micros dt = 0;         // Idle, Sense
  std::string sensor;    // Sense
  int layer = 0;         // Infer, TxLayerOutput
};

Picojoules energy_of(const HardwareProfile& profile, const FrameCosts& frames,
                     const EnergyOp& op);

Picojoules full_pass_energy(const HardwareProfile& profile);

SplitMap build_split_map(const HardwareProfile& profile,
                         const FrameCosts& frames, const BatteryModel& battery);

std::string serialize_profile(const HardwareProfile& profile);

}  // namespace coversim
