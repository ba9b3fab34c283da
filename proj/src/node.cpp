#include "coversim/node.hpp"

#include <algorithm>
#include <cmath>

namespace coversim {

namespace {

constexpr int kFullDepth = SplitMap::kMaxLayers;

Picojoules with_margin(Picojoules e, double margin) {
  return static_cast<Picojoules>(std::llround(static_cast<double>(e) * (1.0 + margin)));
}

Micros never(const NodeContext& ctx) { return ctx.sim_end + kSecond; }

// Time for harvesting alone to lift the store to `target`.
Micros charge_time(const EnergyStore& store, Microwatts power,
                   Picojoules target, const NodeContext& ctx) {
  if (store.soc >= target) return 0;
  if (power <= 0 || target > ctx.battery->capacity) return never(ctx);
  return div_ceil(target - store.soc, power);
}

StepResult sleeping_until(Micros at) {
  return {Phase::Sleeping, at, false, 0, std::nullopt};
}

void discard_pending_tasks(NodeState& n) {
  if (n.own_task) {
    ++n.counters.tasks_dropped;
    n.own_task.reset();
  }
  n.counters.tasks_dropped += static_cast<std::int64_t>(n.adopted_tasks.size());
  n.adopted_tasks.clear();
  n.plan.reset();
}

StepResult enter_deep_sleep(NodeState& n, Micros now, const NodeContext& ctx) {
  n.lifecycle = LifecyclePhase::DeepSleep;
  n.sensing_after_deepsleep = true;
  ++n.counters.deep_sleeps;
  discard_pending_tasks(n);
  // Recovery is padded by one beacon so the first sensing after recovery
  // still starts at or above the recovery fraction.
  const Picojoules target = std::min(
      ctx.battery->capacity,
      ctx.battery->recovery_level() + ctx.frames->beacon_energy);
  const Micros dt = charge_time(n.store, n.env.harvest_power, target, ctx);
  return {Phase::DeepSleep, now + dt, false, 0, std::nullopt};
}

std::optional<int> nearest_neighbor(const NodeState& n, int exclude,
                                    const NodeContext& ctx) {
  std::optional<int> best;
  double best_dist = 0.0;
  for (int pass = 0; pass < 2 && !best; ++pass) {
    for (std::size_t j = 0; j < ctx.positions.size(); ++j) {
      const int id = static_cast<int>(j);
      if (id == n.id) continue;
      if (pass == 0 && id == exclude) continue;
      const double d = distance(n.position, ctx.positions[j]);
      if (d > ctx.params->radius) continue;
      if (!best || d < best_dist) {
        best = id;
        best_dist = d;
      }
    }
  }
  return best;
}

struct PlanOutcome {
  bool drop = true;
  NodeState::Plan plan;
};

PlanOutcome make_plan(NodeState& n, const Task& task, const NodeContext& ctx) {
  const SplitMap& split = *ctx.split;
  const int from = task.layers_done;

  if (n.mode == Mode::Vanilla) {
    // Fixed policy: one layer per touch, then hand the tensor onward.
    const int to = from + 1;
    if (split.cost_between(from, to) > n.store.soc) return {};
    std::optional<int> fwd;
    if (to < kFullDepth) fwd = nearest_neighbor(n, task.received_from, ctx);
    return {false, {task, to, fwd}};
  }

  const double v_i = voltage_of(n.store, *ctx.battery);
  const auto target = pick_offload_target(n.belief, v_i, ctx.positions, n.id,
                                          ctx.params->radius, *ctx.battery);
  const Picojoules budget = n.store.soc - ctx.battery->lower_floor();
  auto afford = [&](int to) { return split.cost_between(from, to) <= budget; };

  // Reference voltage for Eq.-3: the predicted best partner for own tasks,
  // the sender's piggybacked value (or its fresh prediction) for adopted.
  int desired = kFullDepth;
  if (task.adopted) {
    double v_ref = task.sender_voltage;
    if (n.mode == Mode::Algorithm && ctx.params->v_source == VSource::Predicted) {
      auto it = n.belief.find(task.received_from);
      if (it != n.belief.end())
        v_ref = predict_voltage(it->second, v_i, *ctx.battery);
    }
    desired = decide_layers_from(from, v_i, v_ref, split, ctx.params->offload);
  } else if (target) {
    const double v_ref =
        predict_voltage(n.belief.at(*target), v_i, *ctx.battery);
    desired = decide_layers_from(from, v_i, v_ref, split, ctx.params->offload);
  }

  const bool may_forward = target && task.hop_count < ctx.params->max_hops;
  if (desired < kFullDepth && !may_forward) desired = kFullDepth;

  if (desired >= kFullDepth) {
    if (afford(kFullDepth)) return {false, {task, kFullDepth, std::nullopt}};
    if (may_forward) {  // cannot finish here; hand off as deep as we can afford
      for (int to = kFullDepth - 1; to >= from; --to)
        if (afford(to)) return {false, {task, to, target}};
    }
    return {};
  }
  for (int to = desired; to >= from; --to)
    if (afford(to)) return {false, {task, to, target}};
  return {};
}

Picojoules exit_tx_energy(const Task& task, const NodeContext& ctx) {
  if (task.layers_done >= kFullDepth) return ctx.frames->result_energy;
  if (task.layers_done == 0) return ctx.frames->raw_energy;
  return ctx.profile->tx_for_layer_output(task.layers_done - 1).energy;
}

Micros exit_tx_airtime(const Task& task, const NodeContext& ctx) {
  if (task.layers_done >= kFullDepth) return ctx.frames->result_airtime;
  if (task.layers_done == 0) return ctx.frames->raw_airtime;
  return ctx.profile->tx_for_layer_output(task.layers_done - 1).airtime;
}

std::int64_t tensor_bytes(const Task& task, const NodeContext& ctx) {
  if (task.layers_done == 0) return ctx.frames->raw_bytes;
  return ctx.profile->layer(task.layers_done - 1).output_bytes;
}

StepResult charge_sleep(NodeState& n, Micros now, const NodeContext& ctx) {
  const Micros dt =
      charge_time(n.store, n.env.harvest_power, ctx.vanilla_threshold, ctx);
  return sleeping_until(now + std::max<Micros>(dt, 1));
}

StepResult next_work(NodeState& n, Micros now, const NodeContext& ctx);

// Pay for the exit frame and enter Transmitting with it.
StepResult emit_exit(NodeState& n, Task task, std::optional<int> forward_to,
                     Micros now, const NodeContext& ctx) {
  const Picojoules cost = exit_tx_energy(task, ctx);
  const Picojoules floor =
      n.mode == Mode::Algorithm ? ctx.battery->lower_floor() : 0;
  if (n.store.soc - cost < floor) {
    ++n.counters.tasks_dropped;
    if (n.mode == Mode::Algorithm) return enter_deep_sleep(n, now, ctx);
    return charge_sleep(n, now, ctx);
  }
  drain(n.store, cost);

  Packet p;
  p.sender = n.id;
  p.sender_voltage = voltage_of(n.store, *ctx.battery);
  p.sent_at = now;
  p.airtime = exit_tx_airtime(task, ctx);
  if (task.layers_done >= kFullDepth) {
    p.kind = PacketKind::Result;
    p.payload_bytes = ctx.frames->result_bytes;
    ++n.counters.tasks_completed;
  } else {
    p.kind = PacketKind::TaskTensor;
    p.payload_bytes = tensor_bytes(task, ctx);
    p.target = forward_to;
    p.layers_done = task.layers_done;
    p.hop_count = task.hop_count + 1;
    ++n.counters.tasks_offloaded;
  }
  p.task_origin = task.origin;
  p.task_created_at = task.created_at;
  p.task_uid = task.uid;
  ++n.counters.frames_sent;
  n.in_flight = p;
  return {Phase::Transmitting, now + p.airtime, false, 0, p};
}

StepResult next_work(NodeState& n, Micros now, const NodeContext& ctx) {
  for (;;) {
    std::optional<Task> task;
    if (n.own_task) {
      task = std::move(*n.own_task);
      n.own_task.reset();
    } else if (!n.adopted_tasks.empty()) {
      task = std::move(n.adopted_tasks.front());
      n.adopted_tasks.pop_front();
    }
    if (!task) break;

    PlanOutcome out = make_plan(n, *task, ctx);
    if (out.drop) {
      ++n.counters.tasks_dropped;
      continue;
    }
    if (out.plan.run_to > task->layers_done) {
      Micros latency = 0;
      Picojoules cost = 0;
      for (int k = task->layers_done; k < out.plan.run_to; ++k) {
        latency += ctx.profile->infer_latency(k);
        cost += ctx.profile->infer_energy(k);
      }
      drain(n.store, cost);
      n.plan = out.plan;
      return {Phase::Computing, now + latency, false, 0, std::nullopt};
    }
    // nothing to run here: forward the payload as-is
    return emit_exit(n, *task, out.plan.forward_target, now, ctx);
  }

  if (n.mode == Mode::Algorithm) {
    const Micros dur =
        next_sleep(ctx.params->desync, n.overlap_flag, n.backoff_rng);
    if (n.overlap_flag) ++n.counters.overlap_backoffs;
    return sleeping_until(now + dur);
  }
  return charge_sleep(n, now, ctx);
}

StepResult start_cycle(NodeState& n, Micros now, const NodeContext& ctx) {
  const Micros t_sense = plan_sensing(n.store, ctx);
  if (t_sense <= 0) return sleeping_until(now + ctx.params->desync.t_base);

  n.overlap_flag = false;
  ++n.counters.cycles;
  const Picojoules floor = ctx.battery->lower_floor();
  if (n.store.soc - ctx.frames->beacon_energy < floor)
    return enter_deep_sleep(n, now, ctx);
  drain(n.store, ctx.frames->beacon_energy);

  Packet p;
  p.sender = n.id;
  p.sender_voltage = voltage_of(n.store, *ctx.battery);
  p.kind = PacketKind::Beacon;
  p.payload_bytes = ctx.frames->beacon_bytes;
  p.sent_at = now;
  p.airtime = ctx.frames->beacon_airtime;
  ++n.counters.frames_sent;
  n.in_flight = p;
  n.pending_sense = t_sense;
  return {Phase::Transmitting, now + p.airtime, false, 0, p};
}

StepResult vanilla_wake(NodeState& n, Micros now, const NodeContext& ctx) {
  if (n.store.soc < ctx.vanilla_threshold) return charge_sleep(n, now, ctx);
  ++n.counters.cycles;
  n.sensing_started = now;
  // Senses until the reserve floor; the floor guard is the normal exit.
  return {Phase::Sensing, never(ctx), true, ctx.vanilla_floor, std::nullopt};
}

StepResult on_wake(NodeState& n, Micros now, const NodeContext& ctx) {
  if (n.mode == Mode::Vanilla) return vanilla_wake(n, now, ctx);
  n.lifecycle = lifecycle_gate(n.store.fraction(*ctx.battery), n.lifecycle,
                               *ctx.battery);
  if (n.lifecycle == LifecyclePhase::DeepSleep)
    return enter_deep_sleep(n, now, ctx);
  return start_cycle(n, now, ctx);
}

StepResult on_recovery_check(NodeState& n, Micros now, const NodeContext& ctx) {
  n.lifecycle = lifecycle_gate(n.store.fraction(*ctx.battery), n.lifecycle,
                               *ctx.battery);
  if (n.lifecycle == LifecyclePhase::Operational)
    return start_cycle(n, now, ctx);
  const Picojoules target = std::min(
      ctx.battery->capacity,
      ctx.battery->recovery_level() + ctx.frames->beacon_energy);
  const Micros dt = charge_time(n.store, n.env.harvest_power, target, ctx);
  return {Phase::DeepSleep, now + std::max<Micros>(dt, 1), false, 0,
          std::nullopt};
}

StepResult on_tx_done(NodeState& n, Micros now, const NodeContext& ctx) {
  const bool was_beacon =
      n.in_flight && n.in_flight->kind == PacketKind::Beacon;
  n.in_flight.reset();
  if (was_beacon) {
    n.sensing_started = now;
    return {Phase::Sensing, now + n.pending_sense, true,
            ctx.battery->lower_floor(), std::nullopt};
  }
  return next_work(n, now, ctx);
}

StepResult on_sensing_end(NodeState& n, Micros now, bool floor_abort,
                          const NodeContext& ctx) {
  n.sensing_log.push_back({n.sensing_started, now});
  n.counters.sensing_us += now - n.sensing_started;

  if (n.mode == Mode::Vanilla) {
    Task t;
    t.origin = n.id;
    t.layers_done = 0;
    t.payload_bytes = ctx.frames->raw_bytes;
    t.created_at = now;
    t.uid = (static_cast<std::uint64_t>(n.id) << 32) | n.task_seq++;
    ++n.counters.tasks_created;
    n.own_task = t;
    return next_work(n, now, ctx);
  }

  if (floor_abort) {
    ++n.counters.aborted_sensing;
    return enter_deep_sleep(n, now, ctx);
  }
  Task t;
  t.origin = n.id;
  t.layers_done = 0;
  t.payload_bytes = ctx.frames->raw_bytes;
  t.created_at = now;
  t.uid = (static_cast<std::uint64_t>(n.id) << 32) | n.task_seq++;
  ++n.counters.tasks_created;
  n.own_task = t;
  return {Phase::Handover, now + ctx.params->handover, true,
          ctx.battery->lower_floor(), std::nullopt};
}

}  // namespace

Micros plan_sensing(const EnergyStore& store, const NodeContext& ctx) {
  const HardwareProfile& p = *ctx.profile;
  const Picojoules reserve = with_margin(
      p.infer_energy(0) + p.tx_for_layer_output(0).energy,
      ctx.params->safety_margin_frac);
  const Picojoules min_window =
      p.sense_energy(*ctx.sensor, ctx.params->t_sense_min);
  if (store.soc < reserve + min_window) return 0;
  const Micros t = muldiv_floor(store.soc - reserve, ctx.sensor->window,
                                ctx.sensor->window_energy);
  return std::clamp<Micros>(t, 0, ctx.params->t_sense_max);
}

Picojoules vanilla_wake_threshold(const HardwareProfile& profile,
                                  const SensorCost& sensor) {
  return profile.sense_energy(sensor, 3 * kSecond) + profile.infer_energy(0) +
         profile.tx_for_layer_output(0).energy;
}

StepResult step(NodeState& n, Micros now, bool floor_abort,
                const NodeContext& ctx) {
  switch (n.phase) {
    case Phase::Sleeping:
      return on_wake(n, now, ctx);
    case Phase::DeepSleep:
      return on_recovery_check(n, now, ctx);
    case Phase::Transmitting:
      return on_tx_done(n, now, ctx);
    case Phase::Sensing:
      return on_sensing_end(n, now, floor_abort, ctx);
    case Phase::Handover:
      if (floor_abort) {
        discard_pending_tasks(n);
        return enter_deep_sleep(n, now, ctx);
      }
      return next_work(n, now, ctx);
    case Phase::Computing: {
      NodeState::Plan plan = *n.plan;
      n.plan.reset();
      plan.task.layers_done = plan.run_to;
      plan.task.payload_bytes = plan.run_to >= kFullDepth
                                    ? ctx.frames->result_bytes
                                    : tensor_bytes(plan.task, ctx);
      return emit_exit(n, plan.task, plan.forward_target, now, ctx);
    }
    case Phase::Idle:
      return next_work(n, now, ctx);
  }
  return sleeping_until(now + kSecond);
}

void on_packet(NodeState& n, const Packet& packet, Micros now,
               const NodeContext& ctx) {
  if (n.mode == Mode::Algorithm) {
    update_belief(n.belief, packet.sender, packet.sender_voltage,
                  voltage_of(n.store, *ctx.battery), now,
                  ctx.params->ewma_beta, *ctx.battery);
    if (n.phase == Phase::Sensing) n.overlap_flag = true;
  }
  if (packet.kind == PacketKind::TaskTensor && packet.target &&
      *packet.target == n.id) {
    Task t;
    t.origin = packet.task_origin;
    t.layers_done = packet.layers_done;
    t.payload_bytes = packet.payload_bytes;
    t.created_at = packet.task_created_at;
    t.hop_count = packet.hop_count;
    t.uid = packet.task_uid;
    t.adopted = true;
    t.received_from = packet.sender;
    t.sender_voltage = packet.sender_voltage;
    n.adopted_tasks.push_back(t);
    ++n.counters.tasks_adopted;
  }
}

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::DeepSleep:
      return "deep_sleep";
    case Phase::Sleeping:
      return "sleeping";
    case Phase::Sensing:
      return "sensing";
    case Phase::Handover:
      return "handover";
    case Phase::Computing:
      return "computing";
    case Phase::Transmitting:
      return "transmitting";
    case Phase::Idle:
      return "idle";
  }
  return "?";
}

}  // namespace coversim
