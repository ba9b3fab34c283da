#include "coversim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace coversim {

namespace {

std::string row_msg(const std::string& path, int line_no, const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line_no << ": " << what;
  return os.str();
}

struct Row {
  int line_no = 0;
  std::vector<std::string> fields;
};

double parse_num(const std::string& path, const Row& row, std::size_t idx,
                 const char* col) {
  if (idx >= row.fields.size())
    throw ProfileError(row_msg(path, row.line_no,
                               std::string("missing column '") + col + "'"));
  const std::string& s = row.fields[idx];
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size())
    throw ProfileError(row_msg(path, row.line_no,
                               std::string("bad numeric value '") + s +
                                   "' in column '" + col + "'"));
  return v;
}

void require(bool ok, const std::string& path, int line_no,
             const std::string& what) {
  if (!ok) throw ProfileError(row_msg(path, line_no, what));
}

}  // namespace

const LayerCost& HardwareProfile::layer(int k) const {
  if (k < 0 || k >= layer_count())
    throw ProfileError("unknown layer index " + std::to_string(k));
  return layers[static_cast<std::size_t>(k)];
}

const TxCost& HardwareProfile::tx_for_layer_output(int k) const {
  if (k < 0 || k >= static_cast<int>(tx.size()))
    throw ProfileError("no transmission row for layer " + std::to_string(k));
  return tx[static_cast<std::size_t>(k)];
}

const SensorCost& HardwareProfile::sensor(const std::string& name) const {
  for (const auto& s : sensors)
    if (s.name == name) return s;
  throw ProfileError("unknown sensor '" + name + "'");
}

double HardwareProfile::cheapest_density() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : tx) best = std::min(best, t.density_uj_per_byte);
  return best;
}

HardwareProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProfileError(path + ": cannot open profile file");

  HardwareProfile p;
  std::string section;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  bool saw_idle = false;

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Row row{line_no, {}};
    for (std::string tok; ls >> tok;) row.fields.push_back(tok);
    if (row.fields.empty()) continue;

    if (row.fields[0].front() == '[') {
      require(row.fields.size() == 1 && row.fields[0].back() == ']', path,
              line_no, "malformed section header");
      section = row.fields[0].substr(1, row.fields[0].size() - 2);
      require(section == "idle" || section == "layers" || section == "tx" ||
                  section == "sensors",
              path, line_no, "unknown section [" + section + "]");
      saw_header = false;
      continue;
    }
    require(!section.empty(), path, line_no, "data before any [section]");
    if (!saw_header) {  // first row of each section names its columns
      saw_header = true;
      continue;
    }

    if (section == "idle") {
      require(!saw_idle, path, line_no, "duplicate idle row");
      double mw = parse_num(path, row, 0, "power_mw");
      require(mw > 0, path, line_no, "idle power must be > 0");
      p.idle_power = uw_from_mw(mw);
      saw_idle = true;
    } else if (section == "layers") {
      LayerCost c;
      c.layer_index = static_cast<int>(parse_num(path, row, 0, "layer"));
      c.flops = static_cast<std::int64_t>(parse_num(path, row, 1, "flops"));
      c.latency = micros_from_ms(parse_num(path, row, 2, "latency_ms"));
      c.energy = pj_from_uj(parse_num(path, row, 3, "energy_uj"));
      c.avg_power_mw = parse_num(path, row, 4, "power_mw");
      c.output_bytes =
          static_cast<std::int64_t>(parse_num(path, row, 5, "output_bytes"));
      require(c.energy > 0, path, line_no, "layer energy must be > 0");
      require(c.latency > 0, path, line_no, "layer latency must be > 0");
      require(c.output_bytes > 0, path, line_no, "output size must be > 0");
      require(c.layer_index == static_cast<int>(p.layers.size()), path, line_no,
              "layer indices must form a contiguous 0-based range");
      p.layers.push_back(c);
    } else if (section == "tx") {
      TxCost t;
      t.source_layer = static_cast<int>(parse_num(path, row, 0, "source_layer"));
      t.payload_bytes =
          static_cast<std::int64_t>(parse_num(path, row, 1, "payload_bytes"));
      t.airtime = micros_from_ms(parse_num(path, row, 2, "time_ms"));
      t.avg_power_mw = parse_num(path, row, 3, "power_mw");
      t.energy = pj_from_uj(parse_num(path, row, 4, "energy_uj"));
      t.density_uj_per_byte = parse_num(path, row, 5, "density_uj_per_byte");
      require(t.energy > 0, path, line_no, "tx energy must be > 0");
      require(t.payload_bytes > 0, path, line_no, "payload must be > 0");
      require(t.source_layer == static_cast<int>(p.tx.size()), path, line_no,
              "tx source layers must form a contiguous 0-based range");
      double derived = t.density_uj_per_byte *
                       static_cast<double>(t.payload_bytes);
      require(std::abs(derived - microjoules(t.energy)) <=
                  0.01 * microjoules(t.energy),
              path, line_no, "energy density inconsistent with total energy");
      p.tx.push_back(t);
    } else {  // sensors
      SensorCost s;
      require(!row.fields.empty(), path, line_no, "missing sensor name");
      s.name = row.fields[0];
      s.avg_power_mw = parse_num(path, row, 1, "power_mw");
      s.window_energy = pj_from_uj(parse_num(path, row, 2, "energy_3s_uj"));
      s.window = 3 * kSecond;
      require(s.window_energy > 0, path, line_no, "sensor energy must be > 0");
      double derived = s.avg_power_mw * 3.0 * 1000.0;  // mW * 3 s -> uJ
      require(std::abs(derived - microjoules(s.window_energy)) <
                  0.01 * microjoules(s.window_energy),
              path, line_no, "sensor power inconsistent with window energy");
      p.sensors.push_back(s);
    }
  }

  if (!saw_idle) throw ProfileError(path + ": missing [idle] section");
  if (p.layers.empty()) throw ProfileError(path + ": missing [layers] section");
  if (p.tx.size() != p.layers.size())
    throw ProfileError(path + ": [layers] and [tx] must have equal row counts");
  if (p.sensors.empty())
    throw ProfileError(path + ": missing [sensors] section");
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    if (p.tx[k].payload_bytes != p.layers[k].output_bytes)
      throw ProfileError(path + ": tx payload for layer " + std::to_string(k) +
                         " does not match the layer's output size");
  }
  return p;
}

FrameCosts build_frame_costs(const HardwareProfile& profile,
                             const FrameParams& params) {
  FrameCosts f;
  const double density = profile.cheapest_density();

  auto price = [&](std::int64_t bytes, Micros fallback_airtime, Picojoules& e,
                   Micros& airtime) {
    for (const auto& t : profile.tx) {
      if (t.payload_bytes == bytes) {  // reuse the measured row when it matches
        e = t.energy;
        airtime = t.airtime;
        return;
      }
    }
    e = pj_from_uj(density * static_cast<double>(bytes));
    airtime = fallback_airtime;
  };

  f.raw_bytes = params.raw_payload_bytes;
  price(f.raw_bytes, params.beacon_airtime, f.raw_energy, f.raw_airtime);
  f.beacon_bytes = params.beacon_bytes;
  f.beacon_energy = pj_from_uj(density * static_cast<double>(f.beacon_bytes));
  f.beacon_airtime = params.beacon_airtime;
  f.result_bytes = params.result_bytes;
  f.result_energy = pj_from_uj(density * static_cast<double>(f.result_bytes));
  f.result_airtime = params.result_airtime;
  return f;
}

Picojoules energy_of(const HardwareProfile& profile, const FrameCosts& frames,
                     const EnergyOp& op) {
  using Kind = EnergyOp::Kind;
  switch (op.kind) {
    case Kind::Idle:
      return profile.idle_energy(op.dt);
    case Kind::Sense:
      return profile.sense_energy(profile.sensor(op.sensor), op.dt);
    case Kind::Infer:
      return profile.infer_energy(op.layer);
    case Kind::TxLayerOutput:
      return profile.tx_for_layer_output(op.layer).energy;
    case Kind::TxBeacon:
      return frames.beacon_energy;
    case Kind::TxRaw:
      return frames.raw_energy;
    case Kind::TxResult:
      return frames.result_energy;
  }
  return 0;
}

Picojoules full_pass_energy(const HardwareProfile& profile) {
  Picojoules sum = 0;
  for (const auto& l : profile.layers) sum += l.energy;
  return sum;
}

Picojoules SplitMap::cost_between(int from, int to) const {
  Picojoules exit_tx;
  if (to >= kMaxLayers) {
    exit_tx = result_tx;
  } else if (to == 0) {
    exit_tx = raw_tx;
  } else {
    exit_tx = tx_out[static_cast<std::size_t>(to - 1)];
  }
  return (infer_prefix[static_cast<std::size_t>(to)] -
          infer_prefix[static_cast<std::size_t>(from)]) +
         exit_tx;
}

SplitMap build_split_map(const HardwareProfile& profile,
                         const FrameCosts& frames,
                         const BatteryModel& battery) {
  if (profile.layer_count() != SplitMap::kMaxLayers)
    throw ProfileError("split map expects a " +
                       std::to_string(SplitMap::kMaxLayers) +
                       "-layer profile, got " +
                       std::to_string(profile.layer_count()));
  SplitMap m;
  m.volts_per_pj = (battery.v_max - battery.v_min) /
                   static_cast<double>(battery.capacity);
  m.raw_tx = frames.raw_energy;
  m.result_tx = frames.result_energy;
  m.infer_prefix[0] = 0;
  for (int k = 0; k < SplitMap::kMaxLayers; ++k) {
    m.infer_prefix[static_cast<std::size_t>(k + 1)] =
        m.infer_prefix[static_cast<std::size_t>(k)] + profile.infer_energy(k);
    m.tx_out[static_cast<std::size_t>(k)] =
        profile.tx_for_layer_output(k).energy;
  }
  for (int L = 0; L <= SplitMap::kMaxLayers; ++L) {
    m.energy[static_cast<std::size_t>(L)] = m.cost_between(0, L);
    m.v_req[static_cast<std::size_t>(L)] =
        static_cast<double>(m.energy[static_cast<std::size_t>(L)]) *
        m.volts_per_pj;
  }
  for (int L = 1; L < SplitMap::kMaxLayers; ++L) {
    if (m.energy[static_cast<std::size_t>(L + 1)] <=
        m.energy[static_cast<std::size_t>(L)])
      throw ProfileError("split map is not strictly increasing at L=" +
                         std::to_string(L + 1));
  }
  return m;
}

std::string serialize_profile(const HardwareProfile& profile) {
  std::ostringstream os;
  char buf[160];
  os << "[idle]\npower_mw\n";
  std::snprintf(buf, sizeof buf, "%.6g\n", profile.idle_power / 1e3);
  os << buf;
  os << "\n[layers]\nlayer flops latency_ms energy_uj power_mw output_bytes\n";
  for (const auto& l : profile.layers) {
    std::snprintf(buf, sizeof buf, "%d %lld %.6g %.10g %.6g %lld\n",
                  l.layer_index, static_cast<long long>(l.flops),
                  static_cast<double>(l.latency) / 1e3, microjoules(l.energy),
                  l.avg_power_mw, static_cast<long long>(l.output_bytes));
    os << buf;
  }
  os << "\n[tx]\nsource_layer payload_bytes time_ms power_mw energy_uj "
        "density_uj_per_byte\n";
  for (const auto& t : profile.tx) {
    std::snprintf(buf, sizeof buf, "%d %lld %.6g %.6g %.10g %.6g\n",
                  t.source_layer, static_cast<long long>(t.payload_bytes),
                  static_cast<double>(t.airtime) / 1e3, t.avg_power_mw,
                  microjoules(t.energy), t.density_uj_per_byte);
    os << buf;
  }
  os << "\n[sensors]\nname power_mw energy_3s_uj\n";
  for (const auto& s : profile.sensors) {
    std::snprintf(buf, sizeof buf, "%s %.6g %.10g\n", s.name.c_str(),
                  s.avg_power_mw, microjoules(s.window_energy));
    os << buf;
  }
  return os.str();
}

}  // namespace coversim
