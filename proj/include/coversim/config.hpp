#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "coversim/node.hpp"
#include "coversim/units.hpp"

// Scenario configuration: plain-text key=value file, every knob named,
// unknown keys rejected. The bundled paper-default file reproduces the
// evaluation setup (100 nodes, 20 m grid, 50 events/h, 10,000 s).

namespace coversim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  // hardware profile
  std::string profile_path;  // resolved relative to the config file
  std::int64_t raw_payload_bytes = 400;
  std::int64_t beacon_bytes = 16;
  std::int64_t result_bytes = 8;
  double beacon_airtime_ms = 5.0;
  double result_airtime_ms = 5.0;
  std::string sensor = "ultrasonic";

  // battery
  double capacity_mah = 50.0;
  double nominal_v = 3.3;
  double v_min = 3.0;
  double v_max = 4.2;
  double lower_threshold = 0.01;
  double recovery_threshold = 0.20;
  double init_soc_min = 0.3;
  double init_soc_max = 1.0;

  // world
  int nodes = 100;
  double spacing_m = 20.0;
  double radius_m = 20.0;
  double sunny_ratio = 0.5;
  double harvest_sunny_uw = 300.0;
  double harvest_shady_uw = 50.0;
  double event_rate_per_hour = 50.0;
  double event_duration_s = 5.0;
  std::string event_process = "poisson";  // poisson | fixed
  double min_capture_overlap_s = 0.5;
  double raster_m = 1.0;

  // node lifecycle
  double t_sense_min_s = 3.0;
  double t_sense_max_s = 30.0;
  double safety_margin_frac = 0.10;
  double handover_s = 0.2;
  int max_hops = 5;
  double wake_jitter_s = 60.0;

  // coordination
  double t_base_s = 60.0;
  double backoff_min_s = 1.0;
  double backoff_max_s = 10.0;
  double alpha_v = 0.02;
  double ewma_beta = 0.2;
  std::string offload_v_source = "auto";  // auto | predicted | literal

  // network
  double loss_prob = 0.0;
  bool packet_trace = false;

  // engine
  std::string mode = "algorithm";  // vanilla | algorithm
  std::uint64_t seed = 1;
  double duration_s = 10000.0;
  double metrics_sample_s = 1.0;

  void validate() const;

  Micros duration() const { return micros_from_seconds(duration_s); }
  BatteryModel battery() const {
    return BatteryModel::from_mah(capacity_mah, nominal_v, v_min, v_max,
                                  lower_threshold, recovery_threshold);
  }
  FrameParams frame_params() const;
  NodeParams node_params() const;
  Mode parsed_mode() const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig default_config();

}  // namespace coversim
