#pragma once

#include <map>
#include <optional>
#include <span>

#include "coversim/energy.hpp"
#include "coversim/profiles.hpp"
#include "coversim/rng.hpp"
#include "coversim/world.hpp"

// Decentralized coordination state and rules: the self-referenced
// neighbor voltage prediction, its learned per-neighbor correction, the
// collision-aware sleep backoff, and the energy-aware split decision.

namespace coversim {

struct BeliefEntry {
  double v_last = 0.0;          // neighbor's last piggybacked voltage
  Micros t_last = 0;            // when it was heard
  double v_self_at_last = 0.0;  // own voltage at that moment
  double delta_offset = 0.0;    // learned correction
};

// Per-node map of last-known neighbor state; entries exist only for
// neighbors heard from at least once.
using BeliefMap = std::map<int, BeliefEntry>;

// V_hat_j(now) = V_j(t_last) + (V_i(now) - V_i(t_last)) + delta_offset,
// clamped to the proxy range. Rides on adjacent nodes seeing similar
// harvesting conditions.
double predict_voltage(const BeliefEntry& entry, double v_i_now,
                       const BatteryModel& battery);

// Folds the observed prediction error into delta_offset (EWMA with rate
// `beta`), then overwrites the entry with the fresh report.
void update_belief(BeliefMap& beliefs, int sender, double sender_voltage,
                   double v_i_now, Micros now, double beta,
                   const BatteryModel& battery);

struct DesyncParams {
  Micros t_base = 60 * kSecond;
  Micros t_min = 1 * kSecond;
  Micros t_max = 10 * kSecond;
};

// T_base without overlap; T_base + U(t_min, t_max) with. The no-overlap
// path consumes no randomness.
Micros next_sleep(const DesyncParams& params, bool overlap, Rng& rng);

struct OffloadParams {
  double alpha = 0.02;  // hysteresis threshold, volts
};

// Largest L in 0..=5 with (V_i - V_req(L)) > (V_j + alpha); 0 when even
// the raw-forward case fails (the node cannot hold the task).
int decide_layers(double v_i, double v_j, const SplitMap& split,
                  const OffloadParams& params);

// Same criterion for a task already holding `from` completed layers:
// largest target T in from..=5 whose incremental cost passes the test,
// `from` itself meaning pure forwarding.
int decide_layers_from(int from, double v_i, double v_j, const SplitMap& split,
                       const OffloadParams& params);

// argmax of predicted voltage over in-range neighbors with a predicted
// surplus over self; ties broken by lowest id.
std::optional<int> pick_offload_target(const BeliefMap& beliefs, double v_i_now,
                                       std::span<const Position> positions,
                                       int self_id, double radius,
                                       const BatteryModel& battery);

}  // namespace coversim
