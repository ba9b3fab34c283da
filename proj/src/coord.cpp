#include "coversim/coord.hpp"

#include <algorithm>

namespace coversim {

double predict_voltage(const BeliefEntry& entry, double v_i_now,
                       const BatteryModel& battery) {
  const double delta_v_i = v_i_now - entry.v_self_at_last;
  const double raw = entry.v_last + delta_v_i + entry.delta_offset;
  return std::clamp(raw, battery.v_min, battery.v_max);
}

void update_belief(BeliefMap& beliefs, int sender, double sender_voltage,
                   double v_i_now, Micros now, double beta,
                   const BatteryModel& battery) {
  auto it = beliefs.find(sender);
  if (it != beliefs.end()) {
    const double predicted = predict_voltage(it->second, v_i_now, battery);
    it->second.delta_offset = (1.0 - beta) * it->second.delta_offset +
                              beta * (sender_voltage - predicted);
  } else {
    it = beliefs.emplace(sender, BeliefEntry{}).first;
    it->second.delta_offset = 0.0;
  }
  it->second.v_last = sender_voltage;
  it->second.t_last = now;
  it->second.v_self_at_last = v_i_now;
}

Micros next_sleep(const DesyncParams& params, bool overlap, Rng& rng) {
  if (!overlap) return params.t_base;
  const double backoff = rng.uniform(static_cast<double>(params.t_min),
                                     static_cast<double>(params.t_max));
  return params.t_base + static_cast<Micros>(backoff);
}

int decide_layers(double v_i, double v_j, const SplitMap& split,
                  const OffloadParams& params) {
  return decide_layers_from(0, v_i, v_j, split, params);
}

int decide_layers_from(int from, double v_i, double v_j, const SplitMap& split,
                       const OffloadParams& params) {
  int best = from;
  for (int target = from; target <= SplitMap::kMaxLayers; ++target) {
    const double v_req = split.v_req_between(from, target);
    if (v_i - v_req > v_j + params.alpha) best = target;  // strict, Eq. 3
  }
  return best;
}

std::optional<int> pick_offload_target(const BeliefMap& beliefs, double v_i_now,
                                       std::span<const Position> positions,
                                       int self_id, double radius,
                                       const BatteryModel& battery) {
  std::optional<int> best;
  double best_v = 0.0;
  for (const auto& [id, entry] : beliefs) {  // ascending id, ties keep lowest
    if (id == self_id) continue;
    if (distance(positions[static_cast<std::size_t>(self_id)],
                 positions[static_cast<std::size_t>(id)]) > radius)
      continue;
    const double v_hat = predict_voltage(entry, v_i_now, battery);
    if (v_hat <= v_i_now) continue;  // needs a predicted surplus
    if (!best || v_hat > best_v) {
      best = id;
      best_v = v_hat;
    }
  }
  return best;
}

}  // namespace coversim
