#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "coversim/coord.hpp"
#include "coversim/energy.hpp"
#include "coversim/net.hpp"
#include "coversim/profiles.hpp"
#include "coversim/rng.hpp"

// Per-node lifecycle state machine. The engine owns time, settlement of
// continuous power draw, and packet delivery; `step` makes every
// decision at a phase boundary and performs the lump drains (frames,
// layer batches) itself.

namespace coversim {

enum class Mode { Vanilla, Algorithm };

enum class VSource { Auto, Predicted, Literal };

struct NodeParams {
  Micros t_sense_min = 3 * kSecond;
  Micros t_sense_max = 30 * kSecond;
  double safety_margin_frac = 0.10;
  Micros handover = 200 * kMillisecond;
  int max_hops = 5;
  double radius = 20.0;
  DesyncParams desync;
  OffloadParams offload;
  double ewma_beta = 0.2;
  VSource v_source = VSource::Auto;
};

struct Task {
  int origin = -1;
  int layers_done = 0;
  std::int64_t payload_bytes = 0;
  Micros created_at = 0;
  int hop_count = 0;
  std::uint64_t uid = 0;
  bool adopted = false;       // arrived by packet rather than own sensing
  int received_from = -1;
  double sender_voltage = 0;  // literal header value at adoption
};

struct NodeCounters {
  std::int64_t cycles = 0;
  std::int64_t deep_sleeps = 0;
  std::int64_t sensing_us = 0;
  std::int64_t aborted_sensing = 0;
  std::int64_t tasks_created = 0;
  std::int64_t tasks_adopted = 0;
  std::int64_t tasks_completed = 0;
  std::int64_t tasks_offloaded = 0;
  std::int64_t tasks_dropped = 0;
  std::int64_t frames_sent = 0;
  std::int64_t overlap_backoffs = 0;
};

struct NodeState {
  int id = -1;
  Position position;
  EnvClass env;
  Mode mode = Mode::Algorithm;
  EnergyStore store;
  LifecyclePhase lifecycle = LifecyclePhase::Operational;

  Phase phase = Phase::Sleeping;
  Micros phase_start = 0;
  Micros natural_until = 0;  // the phase's own deadline
  bool floor_guard = false;  // engine aborts the phase at floor_pj
  Picojoules floor_pj = 0;
  Micros last_settle = 0;
  std::uint64_t phase_epoch = 0;  // invalidates stale timer events

  bool overlap_flag = false;
  Micros pending_sense = 0;
  Micros sensing_started = 0;
  bool sensing_after_deepsleep = false;  // armed between DeepSleep and next sensing

  std::optional<Task> own_task;
  std::deque<Task> adopted_tasks;
  struct Plan {
    Task task;
    int run_to = 0;  // layers_done after the Computing phase
    std::optional<int> forward_target;
  };
  std::optional<Plan> plan;
  std::optional<Packet> in_flight;  // what Transmitting carries

  BeliefMap belief;
  Rng backoff_rng{0};
  std::uint64_t task_seq = 0;

  std::vector<Interval> sensing_log;
  NodeCounters counters;
};

struct NodeContext {
  const HardwareProfile* profile = nullptr;
  const FrameCosts* frames = nullptr;
  const SplitMap* split = nullptr;
  const BatteryModel* battery = nullptr;
  const NodeParams* params = nullptr;
  const SensorCost* sensor = nullptr;
  std::span<const Position> positions;
  Micros sim_end = 0;
  Picojoules vanilla_threshold = 0;
  Picojoules vanilla_floor = 0;
};

// Maximum sensing duration the residual energy allows after reserving
// enough for one layer of inference plus its transmission (with safety
// margin); 0 when even a minimum window does not fit.
Micros plan_sensing(const EnergyStore& store, const NodeContext& ctx);

// Energy for 3 s of sensing, the first inference layer, and transmitting
// its output: the Vanilla wake threshold.
Picojoules vanilla_wake_threshold(const HardwareProfile& profile,
                                  const SensorCost& sensor);

// What the engine must do after a boundary decision.
struct StepResult {
  Phase next_phase = Phase::Sleeping;
  Micros until = 0;                // phase deadline / wake / recovery check
  bool floor_guard = false;        // abort the phase if soc reaches the floor
  Picojoules floor = 0;
  std::optional<Packet> emit;      // broadcast scheduled by the engine
};

// Advance the node at a phase boundary. `floor_abort` marks that the
// phase was cut short by its energy floor rather than its deadline.
StepResult step(NodeState& node, Micros now, bool floor_abort,
                const NodeContext& ctx);

// Delivery-time handling: belief update, overlap detection, task adoption.
void on_packet(NodeState& node, const Packet& packet, Micros now,
               const NodeContext& ctx);

}  // namespace coversim
