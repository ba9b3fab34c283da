#pragma once

#include <cmath>
#include <cstdint>

// Integer unit system used throughout the simulator.
//
// Time    : int64 microseconds
// Energy  : int64 picojoules
// Power   : int64 microwatts
//
// 1 uW * 1 us == 1 pJ, so power-over-time products stay exact in
// integer arithmetic. All profiling-table values (uJ, ms, mW) convert
// to these units without rounding error, which is what makes the
// energy-conservation audit balance exactly over a full run.

namespace coversim {

using Micros = std::int64_t;      // simulation time
using Picojoules = std::int64_t;  // stored / transferred energy
using Microwatts = std::int64_t;  // constant power draw

inline constexpr Micros kSecond = 1'000'000;
inline constexpr Micros kMillisecond = 1'000;
inline constexpr double kPicojoulesPerJoule = 1e12;

inline Micros micros_from_seconds(double s) {
  return static_cast<Micros>(std::llround(s * 1e6));
}
inline Micros micros_from_ms(double ms) {
  return static_cast<Micros>(std::llround(ms * 1e3));
}
inline double seconds(Micros t) { return static_cast<double>(t) / 1e6; }

inline Picojoules pj_from_uj(double uj) {
  return static_cast<Picojoules>(std::llround(uj * 1e6));
}
inline Picojoules pj_from_j(double j) {
  return static_cast<Picojoules>(std::llround(j * 1e12));
}
inline double joules(Picojoules e) {
  return static_cast<double>(e) / kPicojoulesPerJoule;
}
inline double microjoules(Picojoules e) { return static_cast<double>(e) / 1e6; }

inline Microwatts uw_from_mw(double mw) {
  return static_cast<Microwatts>(std::llround(mw * 1e3));
}
inline Microwatts uw_from_uw(double uw) {
  return static_cast<Microwatts>(std::llround(uw));
}

// floor(value * num / den) without intermediate overflow.
inline std::int64_t muldiv_floor(std::int64_t value, std::int64_t num,
                                 std::int64_t den) {
  __int128 wide = static_cast<__int128>(value) * num;
  return static_cast<std::int64_t>(wide / den);
}

// ceil(a / b) for non-negative a, positive b.
inline std::int64_t div_ceil(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

}  // namespace coversim
