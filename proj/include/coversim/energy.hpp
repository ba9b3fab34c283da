#pragma once

#include <algorithm>

#include "coversim/units.hpp"

// Battery state-of-charge dynamics, solar harvesting, the linear voltage
// proxy, and the two-threshold deep-sleep hysteresis gate.

namespace coversim {

struct BatteryModel {
  Picojoules capacity = 0;
  double v_min = 3.0;
  double v_max = 4.2;
  double lower_threshold = 0.01;     // Operational -> DeepSleep below this
  double recovery_threshold = 0.20;  // DeepSleep -> Operational at/above this

  static BatteryModel from_mah(double mah, double nominal_v, double v_min,
                               double v_max, double lower, double recovery) {
    BatteryModel b;
    b.capacity = pj_from_j(mah * 3.6 * nominal_v);  // mAh * 3600 s/h / 1000
    b.v_min = v_min;
    b.v_max = v_max;
    b.lower_threshold = lower;
    b.recovery_threshold = recovery;
    return b;
  }

  Picojoules lower_floor() const {
    return static_cast<Picojoules>(lower_threshold *
                                   static_cast<double>(capacity));
  }
  Picojoules recovery_level() const {
    return static_cast<Picojoules>(recovery_threshold *
                                   static_cast<double>(capacity));
  }
  double voltage_at_fraction(double frac) const {
    return v_min + frac * (v_max - v_min);
  }
};

enum class EnvKind { Sunny, Shady };

struct EnvClass {
  EnvKind kind = EnvKind::Sunny;
  Microwatts harvest_power = 0;
};

// Exact energy bookkeeping: soc == initial + harvested - consumed always
// holds in integer picojoules. `harvested` counts applied (post-clamp)
// intake; the clamped-away remainder lands in `wasted`.
struct EnergyStore {
  Picojoules soc = 0;
  Picojoules initial = 0;
  Picojoules harvested = 0;
  Picojoules consumed = 0;
  Picojoules wasted = 0;

  double fraction(const BatteryModel& b) const {
    return static_cast<double>(soc) / static_cast<double>(b.capacity);
  }
};

inline void harvest(EnergyStore& store, Microwatts power, Micros dt,
                    const BatteryModel& battery) {
  if (dt <= 0 || power <= 0) return;
  Picojoules intake = power * dt;
  Picojoules applied = std::min(intake, battery.capacity - store.soc);
  store.soc += applied;
  store.harvested += applied;
  store.wasted += intake - applied;
}

struct DrainOutcome {
  bool depleted = false;
  Picojoules shortfall = 0;
};

// Removes `amount` from the store; on insufficient charge clamps soc to 0,
// reports the shortfall, and the caller must abort the in-flight operation.
inline DrainOutcome drain(EnergyStore& store, Picojoules amount) {
  if (amount <= 0) return {};
  if (store.soc >= amount) {
    store.soc -= amount;
    store.consumed += amount;
    return {};
  }
  DrainOutcome out{true, amount - store.soc};
  store.consumed += store.soc;
  store.soc = 0;
  return out;
}

inline double voltage_of(const EnergyStore& store, const BatteryModel& b) {
  return b.voltage_at_fraction(store.fraction(b));
}

enum class LifecyclePhase { Operational, DeepSleep };

inline LifecyclePhase lifecycle_gate(double soc_fraction, LifecyclePhase phase,
                                     const BatteryModel& b) {
  if (phase == LifecyclePhase::Operational) {
    return soc_fraction < b.lower_threshold ? LifecyclePhase::DeepSleep
                                            : LifecyclePhase::Operational;
  }
  return soc_fraction >= b.recovery_threshold ? LifecyclePhase::Operational
                                              : LifecyclePhase::DeepSleep;
}

}  // namespace coversim
