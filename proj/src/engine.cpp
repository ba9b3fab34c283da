#include "coversim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "coversim/net.hpp"
#include "coversim/profiles.hpp"
#include "coversim/rng.hpp"

namespace coversim {

namespace {

enum class EvKind { Delivery = 0, PhaseEnd = 1, Sample = 2 };

struct Event {
  Micros t = 0;
  EvKind kind = EvKind::Sample;
  std::uint64_t seq = 0;
  int node = -1;               // PhaseEnd
  std::uint64_t epoch = 0;     // PhaseEnd staleness check
  std::size_t packet_idx = 0;  // Delivery
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.seq > b.seq;
  }
};

class Engine {
 public:
  explicit Engine(const ScenarioConfig& cfg)
      : cfg_(cfg),
        profile_(load_profile(cfg.profile_path)),
        frames_(build_frame_costs(profile_, cfg.frame_params())),
        battery_(cfg.battery()),
        split_(build_split_map(profile_, frames_, battery_)),
        params_(cfg.node_params()),
        sensor_(&profile_.sensor(cfg.sensor)),
        positions_(build_hex_grid(cfg.nodes, cfg.spacing_m)),
        region_(Region::bounding(positions_, cfg.raster_m)),
        raster_(region_, positions_, cfg.radius_m),
        sim_end_(cfg.duration()),
        loss_rng_(Rng::stream(cfg.seed, "net/loss")) {
    ctx_.profile = &profile_;
    ctx_.frames = &frames_;
    ctx_.split = &split_;
    ctx_.battery = &battery_;
    ctx_.params = &params_;
    ctx_.sensor = sensor_;
    ctx_.positions = positions_;
    ctx_.sim_end = sim_end_;
    ctx_.vanilla_threshold = vanilla_wake_threshold(profile_, *sensor_);
    ctx_.vanilla_floor = static_cast<Picojoules>(std::llround(
        static_cast<double>(profile_.infer_energy(0) +
                            profile_.tx_for_layer_output(0).energy) *
        (1.0 + params_.safety_margin_frac)));
  }

  Metrics run() {
    init_world();
    init_nodes();
    schedule_samples();

    Micros last_t = 0;
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      if (ev.t > sim_end_) break;
      if (ev.t < last_t)
        throw InvariantError("event loop causality breach");
      last_t = ev.t;
      switch (ev.kind) {
        case EvKind::Sample:
          on_sample(ev.t);
          break;
        case EvKind::Delivery:
          on_delivery(ev.t, packets_[ev.packet_idx]);
          break;
        case EvKind::PhaseEnd:
          on_phase_end(ev);
          break;
      }
    }

    finalize();
    return std::move(metrics_);
  }

 private:
  void init_world() {
    Rng env_rng = Rng::stream(cfg_.seed, "world/env");
    env_ = assign_env(cfg_.nodes, cfg_.sunny_ratio,
                      uw_from_uw(cfg_.harvest_sunny_uw),
                      uw_from_uw(cfg_.harvest_shady_uw), env_rng);
    Rng ev_rng = Rng::stream(cfg_.seed, "world/events");
    metrics_.events = gen_events(cfg_.event_rate_per_hour, sim_end_,
                                 micros_from_seconds(cfg_.event_duration_s),
                                 region_, ev_rng,
                                 cfg_.event_process == "fixed");
    metrics_.region_area_m2 = region_.area();
  }

  void init_nodes() {
    nodes_.resize(static_cast<std::size_t>(cfg_.nodes));
    metrics_.soc_fraction.resize(static_cast<std::size_t>(cfg_.nodes));
    const Mode mode = cfg_.parsed_mode();
    for (int i = 0; i < cfg_.nodes; ++i) {
      NodeState& n = nodes_[static_cast<std::size_t>(i)];
      n.id = i;
      n.position = positions_[static_cast<std::size_t>(i)];
      n.env = env_[static_cast<std::size_t>(i)];
      n.mode = mode;
      Rng init = Rng::stream(cfg_.seed, "node/init", static_cast<std::uint64_t>(i));
      const double frac = init.uniform(cfg_.init_soc_min, cfg_.init_soc_max);
      n.store.soc = static_cast<Picojoules>(
          frac * static_cast<double>(battery_.capacity));
      n.store.initial = n.store.soc;
      n.backoff_rng =
          Rng::stream(cfg_.seed, "node/backoff", static_cast<std::uint64_t>(i));
      Rng jitter =
          Rng::stream(cfg_.seed, "node/jitter", static_cast<std::uint64_t>(i));
      const Micros wake = static_cast<Micros>(
          jitter.uniform01() * cfg_.wake_jitter_s * 1e6);
      n.phase = Phase::Sleeping;
      n.natural_until = wake;
      push_phase_end(i, wake, n.phase_epoch);
    }
  }

  void schedule_samples() {
    const Micros step = micros_from_seconds(cfg_.metrics_sample_s);
    for (Micros t = 0; t <= sim_end_; t += step)
      queue_.push({t, EvKind::Sample, seq_++, -1, 0, 0});
  }

  void push_phase_end(int node, Micros t, std::uint64_t epoch) {
    queue_.push({t, EvKind::PhaseEnd, seq_++, node, epoch, 0});
  }

  // Continuous power draw of the current phase, if any, as pJ num/den per us.
  bool phase_power_of(const NodeState& n, Picojoules& num, Micros& den) const {
    switch (n.phase) {
      case Phase::Sensing:
        num = sensor_->window_energy;
        den = sensor_->window;
        return true;
      case Phase::Handover:
      case Phase::Idle:
        num = profile_.idle_power;
        den = 1;
        return true;
      default:
        return false;
    }
  }

  void settle(NodeState& n, Micros now) {
    const Micros dt = now - n.last_settle;
    if (dt <= 0) return;
    n.last_settle = now;
    harvest(n.store, n.env.harvest_power, dt, battery_);
    Picojoules num;
    Micros den;
    if (phase_power_of(n, num, den)) {
      const Picojoules cost = muldiv_floor(num, dt, den);
      if (drain(n.store, cost).depleted)
        throw InvariantError("node " + std::to_string(n.id) +
                             " drained past zero outside a guarded phase");
    }
  }

  // Conservative time until soc would reach `floor` in the current phase.
  Micros floor_crossing_dt(const NodeState& n, Picojoules floor) const {
    Picojoules num;
    Micros den;
    if (!phase_power_of(n, num, den)) return -1;
    const Picojoules net_num = num - n.env.harvest_power * den;
    if (net_num <= 0) return -1;  // harvesting keeps up
    const Picojoules budget = n.store.soc - floor;
    if (budget <= 0) return 0;
    return std::max<Micros>(muldiv_floor(budget, den, net_num), 1);
  }

  bool past_floor(const NodeState& n, Picojoules floor) const {
    Picojoules num;
    Micros den;
    if (!phase_power_of(n, num, den)) return false;
    const Picojoules per_us = div_ceil(num, den) - n.env.harvest_power;
    return n.store.soc - floor < std::max<Picojoules>(per_us, 1);
  }

  void apply(NodeState& n, const StepResult& r, Micros now) {
    const Phase prev = n.phase;
    n.phase = r.next_phase;
    n.phase_start = now;
    n.natural_until = r.until;
    n.floor_guard = r.floor_guard;
    n.floor_pj = r.floor;
    ++n.phase_epoch;

    if (n.phase == Phase::Sensing && prev != Phase::Sensing) {
      if (n.sensing_after_deepsleep) {
        if (n.store.fraction(battery_) < battery_.recovery_threshold)
          ++metrics_.hysteresis_violations;
        n.sensing_after_deepsleep = false;
      }
    }

    Micros when = r.until;
    if (r.floor_guard) {
      const Micros dt = floor_crossing_dt(n, r.floor);
      if (dt >= 0) when = std::min(when, now + dt);
    }
    if (when <= sim_end_) push_phase_end(n.id, when, n.phase_epoch);

    if (r.emit) {
      const Micros arrival = now + r.emit->airtime;
      if (arrival <= sim_end_) {
        packets_.push_back(*r.emit);
        queue_.push({arrival, EvKind::Delivery, seq_++, -1, 0,
                     packets_.size() - 1});
      }
      if (cfg_.packet_trace)
        metrics_.packets.push_back(
            {now, r.emit->sender, r.emit->kind, r.emit->payload_bytes, {}});
    }
  }

  void on_phase_end(const Event& ev) {
    NodeState& n = nodes_[static_cast<std::size_t>(ev.node)];
    if (ev.epoch != n.phase_epoch) return;  // superseded transition
    settle(n, ev.t);

    bool floor_abort = false;
    if (n.floor_guard && ev.t < n.natural_until) {
      if (!past_floor(n, n.floor_pj)) {
        // conservative estimate undershot; narrow in on the crossing
        const Micros dt = floor_crossing_dt(n, n.floor_pj);
        if (dt >= 0) {
          push_phase_end(n.id, std::min(n.natural_until, ev.t + dt),
                         n.phase_epoch);
          return;
        }
        // harvest caught up; wait for the natural deadline
        if (n.natural_until <= sim_end_)
          push_phase_end(n.id, n.natural_until, n.phase_epoch);
        return;
      }
      floor_abort = true;
    }
    apply(n, step(n, ev.t, floor_abort, ctx_), ev.t);
  }

  void on_delivery(Micros now, const Packet& pkt) {
    PacketRecord* rec = nullptr;
    if (cfg_.packet_trace) {
      for (auto it = metrics_.packets.rbegin(); it != metrics_.packets.rend();
           ++it) {
        if (it->sender == pkt.sender && it->time == pkt.sent_at) {
          rec = &*it;
          break;
        }
      }
    }
    for (int j = 0; j < cfg_.nodes; ++j) {
      if (j == pkt.sender) continue;
      NodeState& receiver = nodes_[static_cast<std::size_t>(j)];
      if (!in_range(receiver.position,
                    positions_[static_cast<std::size_t>(pkt.sender)],
                    cfg_.radius_m))
        continue;
      const bool addressed = pkt.target && *pkt.target == j;
      if (!receive_capable(receiver.phase)) {
        if (addressed) ++metrics_.lost_offloads;
        continue;
      }
      if (cfg_.loss_prob > 0 && loss_rng_.uniform01() < cfg_.loss_prob) {
        if (addressed) ++metrics_.lost_offloads;
        continue;
      }
      settle(receiver, now);
      on_packet(receiver, pkt, now, ctx_);
      ++metrics_.frames_delivered;
      if (rec) rec->receivers.push_back(j);
    }
  }

  void on_sample(Micros now) {
    sensing_ids_.clear();
    for (auto& n : nodes_) {
      settle(n, now);
      if (n.phase == Phase::Sensing) sensing_ids_.push_back(n.id);
      metrics_.soc_fraction[static_cast<std::size_t>(n.id)].push_back(
          static_cast<float>(n.store.fraction(battery_)));
    }
    metrics_.sample_times_s.push_back(seconds(now));
    metrics_.coverage.push_back(raster_.fraction(sensing_ids_));
  }

  void finalize() {
    for (auto& n : nodes_) {
      settle(n, sim_end_);
      if (n.phase == Phase::Sensing && sim_end_ > n.sensing_started) {
        n.sensing_log.push_back({n.sensing_started, sim_end_});
        n.counters.sensing_us += sim_end_ - n.sensing_started;
      }
    }

    // event capture is evaluated against the recorded sensing windows
    std::vector<std::vector<Interval>> logs;
    logs.reserve(nodes_.size());
    for (auto& n : nodes_) logs.push_back(n.sensing_log);
    const Micros min_overlap = micros_from_seconds(cfg_.min_capture_overlap_s);
    metrics_.events_occurred = static_cast<std::int64_t>(metrics_.events.size());
    for (auto& e : metrics_.events) {
      e.captured_by =
          event_captured(e, logs, positions_, cfg_.radius_m, min_overlap);
      if (e.captured_by) ++metrics_.events_captured;
    }

    __int128 expected = 0;
    __int128 actual = 0;
    for (auto& n : nodes_) {
      expected += n.store.initial + n.store.harvested - n.store.consumed;
      actual += n.store.soc;
      metrics_.wasted_harvest_j += joules(n.store.wasted);

      NodeSummary s;
      s.id = n.id;
      s.position = n.position;
      s.env = n.env.kind;
      s.initial_soc_j = joules(n.store.initial);
      s.final_soc_j = joules(n.store.soc);
      s.harvested_j = joules(n.store.harvested);
      s.consumed_j = joules(n.store.consumed);
      s.wasted_j = joules(n.store.wasted);
      s.sensing_s = seconds(n.counters.sensing_us);
      s.counters = n.counters;
      metrics_.nodes.push_back(s);

      metrics_.frames_sent += n.counters.frames_sent;
      metrics_.tasks_created += n.counters.tasks_created;
      metrics_.tasks_completed += n.counters.tasks_completed;
      metrics_.tasks_offloaded += n.counters.tasks_offloaded;
      metrics_.tasks_dropped += n.counters.tasks_dropped;
    }
    const __int128 gap = expected > actual ? expected - actual : actual - expected;
    metrics_.energy_audit_gap_j = static_cast<double>(gap) / kPicojoulesPerJoule;
    if (metrics_.energy_audit_gap_j > 1e-6)
      throw InvariantError("energy conservation audit failed: gap " +
                           std::to_string(metrics_.energy_audit_gap_j) + " J");

    double sum = 0;
    for (double c : metrics_.coverage) sum += c;
    const double count = std::max<std::size_t>(metrics_.coverage.size(), 1);
    metrics_.mean_coverage = sum / count;
    double var = 0;
    for (double c : metrics_.coverage) {
      const double d = c - metrics_.mean_coverage;
      var += d * d;
    }
    metrics_.std_coverage = std::sqrt(var / count);
  }

  ScenarioConfig cfg_;
  HardwareProfile profile_;
  FrameCosts frames_;
  BatteryModel battery_;
  SplitMap split_;
  NodeParams params_;
  const SensorCost* sensor_;
  std::vector<Position> positions_;
  Region region_;
  CoverageRaster raster_;
  Micros sim_end_;
  Rng loss_rng_;

  std::vector<EnvClass> env_;
  std::vector<NodeState> nodes_;
  NodeContext ctx_;
  Metrics metrics_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::vector<Packet> packets_;
  std::vector<int> sensing_ids_;
  std::uint64_t seq_ = 0;
};

}  // namespace

Metrics run(const ScenarioConfig& config) {
  config.validate();
  Engine engine(config);
  return engine.run();
}

ComparisonReport compare_modes(const ScenarioConfig& config, int n_seeds) {
  ComparisonReport report;
  report.region_area_m2 = 0;
  report.duration_s = config.duration_s;

  for (int k = 0; k < n_seeds; ++k) {
    ScenarioConfig base = config;
    base.seed = config.seed + static_cast<std::uint64_t>(k);

    ScenarioConfig van = base;
    van.mode = "vanilla";
    ScenarioConfig alg = base;
    alg.mode = "algorithm";
    const Metrics mv = run(van);
    const Metrics ma = run(alg);
    report.region_area_m2 = mv.region_area_m2;

    ComparisonRow row;
    row.seed = base.seed;
    row.mean_cov_vanilla = mv.mean_coverage;
    row.mean_cov_algorithm = ma.mean_coverage;
    row.std_cov_vanilla = mv.std_coverage;
    row.std_cov_algorithm = ma.std_coverage;
    row.events_occurred = mv.events_occurred;
    row.captured_vanilla = mv.events_captured;
    row.captured_algorithm = ma.events_captured;
    report.rows.push_back(row);

    if (row.mean_cov_algorithm > row.mean_cov_vanilla)
      ++report.seeds_with_coverage_gain;
    if (row.std_cov_algorithm < row.std_cov_vanilla)
      ++report.seeds_with_lower_std;
  }

  double d_mean = 0, d_std = 0;
  std::int64_t occ = 0, cap_v = 0, cap_a = 0;
  for (const auto& r : report.rows) {
    d_mean += r.mean_cov_algorithm - r.mean_cov_vanilla;
    d_std += r.std_cov_algorithm - r.std_cov_vanilla;
    occ += r.events_occurred;
    cap_v += r.captured_vanilla;
    cap_a += r.captured_algorithm;
  }
  const double n = std::max<std::size_t>(report.rows.size(), 1);
  report.delta_mean_coverage = d_mean / n;
  report.delta_std_coverage = d_std / n;
  report.extra_area_m2 = report.delta_mean_coverage * report.region_area_m2;
  if (occ > 0) {
    report.capture_rate_vanilla = static_cast<double>(cap_v) / occ;
    report.capture_rate_algorithm = static_cast<double>(cap_a) / occ;
  }
  report.projected_extra_events_per_day =
      (static_cast<double>(cap_a - cap_v) / n) * 86400.0 /
      std::max(report.duration_s, 1e-9);
  return report;
}

}  // namespace coversim
