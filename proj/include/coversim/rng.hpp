#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

// Portable seeded RNG with named substreams.
//
// Every random decision in a run draws from a stream derived by hashing
// (seed, label, index), so results do not depend on the order in which
// nodes are iterated and stay reproducible across platforms. Core
// generator is xoshiro256**; stream seeding goes through splitmix64.

namespace coversim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  // Substream for (seed, label, index); independent of draw order elsewhere.
  static Rng stream(std::uint64_t seed, std::string_view label,
                    std::uint64_t index = 0) {
    std::uint64_t sm = seed ^ fnv1a64(label);
    splitmix64(sm);
    sm ^= 0xD1B54A32D192ED03ULL * (index + 1);
    return Rng(splitmix64(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 significant bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Unbiased integer in [0, n). Lemire's method, fixed-point rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Poisson count via summed Exp(1) arrivals; O(mean) but safe for any mean.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    double sum = 0.0;
    std::uint64_t count = 0;
    for (;;) {
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      sum += -std::log(u);
      if (sum > mean) return count;
      ++count;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace coversim
