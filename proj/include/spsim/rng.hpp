#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spsim {

// xoshiro256++ 1.0 (Blackman & Vigna), seeded through splitmix64.
// The generator is pinned by name so that click streams and trajectory
// records can be reproduced bit-for-bit from (algorithm, master_seed,
// stream index) alone.

inline constexpr const char* kRngAlgorithm = "xoshiro256++-1.0/splitmix64";

inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64_next(sm);
  }

  // Derived stream for an indexed substream (trial, detector stage, ...).
  static Xoshiro256pp stream(uint64_t master_seed, uint64_t index) {
    uint64_t sm = master_seed;
    uint64_t base = splitmix64_next(sm);
    return Xoshiro256pp(base ^ (index * 0xD2B74407B1CE6E93ull + 0x9E3779B97F4A7C15ull));
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1], safe as argument of log().
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> state_{};
};

}  // namespace spsim
