#pragma once

#include <cstdint>
#include <optional>

#include "coversim/units.hpp"
#include "coversim/world.hpp"

// Fixed-radius broadcast radio with piggybacked voltage headers. No MAC,
// no acks, no interference: every frame reaches every in-range node whose
// radio is powered at the delivery instant.

namespace coversim {

enum class PacketKind { Beacon, TaskTensor, Result };

struct Packet {
  int sender = -1;
  double sender_voltage = 0.0;  // piggyback header, sampled at send time
  PacketKind kind = PacketKind::Beacon;
  std::int64_t payload_bytes = 0;
  Micros sent_at = 0;
  Micros airtime = 0;
  // TaskTensor metadata. Delivery is still broadcast; `target` only marks
  // which receiver should adopt the task.
  std::optional<int> target;
  int layers_done = 0;
  int task_origin = -1;
  Micros task_created_at = 0;
  int hop_count = 0;
  std::uint64_t task_uid = 0;
};

inline bool in_range(const Position& a, const Position& b, double radius) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radius * radius;  // boundary inclusive
}

enum class Phase {
  DeepSleep,
  Sleeping,
  Sensing,
  Handover,
  Computing,
  Transmitting,
  Idle,
};

// Radios of sleeping nodes are off; a transmitting node is half-duplex.
inline bool receive_capable(Phase phase) {
  switch (phase) {
    case Phase::Sensing:
    case Phase::Handover:
    case Phase::Idle:
    case Phase::Computing:
      return true;
    case Phase::DeepSleep:
    case Phase::Sleeping:
    case Phase::Transmitting:
      return false;
  }
  return false;
}

const char* phase_name(Phase phase);

}  // namespace coversim
