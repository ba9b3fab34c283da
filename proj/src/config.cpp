#include "coversim/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace coversim {

namespace {

std::string dirname_of(const std::string& path) {
  auto slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  return path.substr(0, slash);
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (profile_path.empty()) fail("profile must name a profile file");
  if (nodes < 1) fail("nodes must be >= 1");
  if (spacing_m <= 0) fail("spacing_m must be > 0");
  if (radius_m <= 0) fail("radius_m must be > 0");
  if (sunny_ratio < 0 || sunny_ratio > 1) fail("sunny_ratio must be in [0,1]");
  if (capacity_mah <= 0 || nominal_v <= 0) fail("battery capacity must be > 0");
  if (!(v_min < v_max)) fail("v_min must be < v_max");
  if (!(lower_threshold > 0 && lower_threshold < recovery_threshold &&
        recovery_threshold < 1))
    fail("thresholds must satisfy 0 < lower < recovery < 1");
  if (init_soc_min < 0 || init_soc_max > 1 || init_soc_min > init_soc_max)
    fail("init_soc bounds must satisfy 0 <= min <= max <= 1");
  if (event_rate_per_hour < 0) fail("event_rate_per_hour must be >= 0");
  if (event_process != "poisson" && event_process != "fixed")
    fail("event_process must be poisson or fixed");
  if (raster_m <= 0) fail("raster_m must be > 0");
  if (t_sense_min_s < 0 || t_sense_max_s < t_sense_min_s)
    fail("sensing bounds must satisfy 0 <= min <= max");
  if (safety_margin_frac < 0) fail("safety_margin_frac must be >= 0");
  if (handover_s < 0) fail("handover_s must be >= 0");
  if (max_hops < 0) fail("max_hops must be >= 0");
  if (t_base_s <= 0) fail("t_base_s must be > 0");
  if (!(backoff_min_s >= 0 && backoff_min_s < backoff_max_s))
    fail("backoff bounds must satisfy 0 <= min < max");
  if (alpha_v < 0) fail("alpha_v must be >= 0");
  if (ewma_beta < 0 || ewma_beta > 1) fail("ewma_beta must be in [0,1]");
  if (offload_v_source != "auto" && offload_v_source != "predicted" &&
      offload_v_source != "literal")
    fail("offload_v_source must be auto, predicted or literal");
  if (loss_prob < 0 || loss_prob > 1) fail("loss_prob must be in [0,1]");
  if (mode != "vanilla" && mode != "algorithm")
    fail("mode must be vanilla or algorithm");
  if (duration_s < 0) fail("duration_s must be >= 0");
  if (metrics_sample_s <= 0) fail("metrics_sample_s must be > 0");
  if (raw_payload_bytes <= 0 || beacon_bytes <= 0 || result_bytes <= 0)
    fail("frame sizes must be > 0");
  if (min_capture_overlap_s < 0) fail("min_capture_overlap_s must be >= 0");
  if (wake_jitter_s < 0) fail("wake_jitter_s must be >= 0");
}

FrameParams ScenarioConfig::frame_params() const {
  FrameParams f;
  f.raw_payload_bytes = raw_payload_bytes;
  f.beacon_bytes = beacon_bytes;
  f.result_bytes = result_bytes;
  f.beacon_airtime = micros_from_ms(beacon_airtime_ms);
  f.result_airtime = micros_from_ms(result_airtime_ms);
  return f;
}

NodeParams ScenarioConfig::node_params() const {
  NodeParams p;
  p.t_sense_min = micros_from_seconds(t_sense_min_s);
  p.t_sense_max = micros_from_seconds(t_sense_max_s);
  p.safety_margin_frac = safety_margin_frac;
  p.handover = micros_from_seconds(handover_s);
  p.max_hops = max_hops;
  p.radius = radius_m;
  p.desync = {micros_from_seconds(t_base_s), micros_from_seconds(backoff_min_s),
              micros_from_seconds(backoff_max_s)};
  p.offload = {alpha_v};
  p.ewma_beta = ewma_beta;
  p.v_source = offload_v_source == "predicted"
                   ? VSource::Predicted
                   : (offload_v_source == "literal" ? VSource::Literal
                                                    : VSource::Auto);
  return p;
}

Mode ScenarioConfig::parsed_mode() const {
  return mode == "vanilla" ? Mode::Vanilla : Mode::Algorithm;
}

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");

  ScenarioConfig cfg;
  std::map<std::string, std::function<void(const std::string&)>> setters;

  auto num = [&](const std::string& key, const std::string& value) -> double {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != value.size())
      throw ConfigError(path + ": bad numeric value for " + key + ": '" +
                        value + "'");
    return v;
  };
  auto set_d = [&](const std::string& key, double* field) {
    setters[key] = [&, key, field](const std::string& v) { *field = num(key, v); };
  };
  auto set_i = [&](const std::string& key, int* field) {
    setters[key] = [&, key, field](const std::string& v) {
      *field = static_cast<int>(num(key, v));
    };
  };
  auto set_i64 = [&](const std::string& key, std::int64_t* field) {
    setters[key] = [&, key, field](const std::string& v) {
      *field = static_cast<std::int64_t>(num(key, v));
    };
  };
  auto set_s = [&](const std::string& key, std::string* field) {
    setters[key] = [field](const std::string& v) { *field = v; };
  };

  set_s("profile", &cfg.profile_path);
  set_i64("raw_payload_bytes", &cfg.raw_payload_bytes);
  set_i64("beacon_bytes", &cfg.beacon_bytes);
  set_i64("result_bytes", &cfg.result_bytes);
  set_d("beacon_airtime_ms", &cfg.beacon_airtime_ms);
  set_d("result_airtime_ms", &cfg.result_airtime_ms);
  set_s("sensor", &cfg.sensor);
  set_d("capacity_mah", &cfg.capacity_mah);
  set_d("nominal_v", &cfg.nominal_v);
  set_d("v_min", &cfg.v_min);
  set_d("v_max", &cfg.v_max);
  set_d("lower_threshold", &cfg.lower_threshold);
  set_d("recovery_threshold", &cfg.recovery_threshold);
  set_d("init_soc_min", &cfg.init_soc_min);
  set_d("init_soc_max", &cfg.init_soc_max);
  set_i("nodes", &cfg.nodes);
  set_d("spacing_m", &cfg.spacing_m);
  set_d("radius_m", &cfg.radius_m);
  set_d("sunny_ratio", &cfg.sunny_ratio);
  set_d("harvest_sunny_uw", &cfg.harvest_sunny_uw);
  set_d("harvest_shady_uw", &cfg.harvest_shady_uw);
  set_d("event_rate_per_hour", &cfg.event_rate_per_hour);
  set_d("event_duration_s", &cfg.event_duration_s);
  set_s("event_process", &cfg.event_process);
  set_d("min_capture_overlap_s", &cfg.min_capture_overlap_s);
  set_d("raster_m", &cfg.raster_m);
  set_d("t_sense_min_s", &cfg.t_sense_min_s);
  set_d("t_sense_max_s", &cfg.t_sense_max_s);
  set_d("safety_margin_frac", &cfg.safety_margin_frac);
  set_d("handover_s", &cfg.handover_s);
  set_i("max_hops", &cfg.max_hops);
  set_d("wake_jitter_s", &cfg.wake_jitter_s);
  set_d("t_base_s", &cfg.t_base_s);
  set_d("backoff_min_s", &cfg.backoff_min_s);
  set_d("backoff_max_s", &cfg.backoff_max_s);
  set_d("alpha_v", &cfg.alpha_v);
  set_d("ewma_beta", &cfg.ewma_beta);
  set_s("offload_v_source", &cfg.offload_v_source);
  set_d("loss_prob", &cfg.loss_prob);
  setters["packet_trace"] = [&](const std::string& v) {
    if (v == "true" || v == "1")
      cfg.packet_trace = true;
    else if (v == "false" || v == "0")
      cfg.packet_trace = false;
    else
      throw ConfigError(path + ": packet_trace must be true or false");
  };
  set_s("mode", &cfg.mode);
  setters["seed"] = [&](const std::string& v) {
    cfg.seed = static_cast<std::uint64_t>(std::stoull(v));
  };
  set_d("duration_s", &cfg.duration_s);
  set_d("metrics_sample_s", &cfg.metrics_sample_s);

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    it->second(value);
  }

  if (!cfg.profile_path.empty() && cfg.profile_path.front() != '/')
    cfg.profile_path = dirname_of(path) + "/" + cfg.profile_path;
  cfg.validate();
  return cfg;
}

}  // namespace coversim
