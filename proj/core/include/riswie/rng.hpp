#pragma once

// Deterministic, splittable pseudo-random generator. xoshiro256++ core with
// SplitMix64 seeding. split(stream) derives an independent child generator
// as a pure function of the parent state and the stream index, so per-task
// streams never depend on thread scheduling or on how many draws other
// tasks consumed. Every randomized routine in this library takes a seed or
// an Rng and derives its own streams this way; results are reproducible
// bit-for-bit for a fixed seed within one build.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace riswie {

namespace rng_detail {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace rng_detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = rng_detail::splitmix64(sm);
    // All-zero state is invalid for xoshiro; splitmix64 output makes this
    // astronomically unlikely, but guard anyway.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  // Child stream: a keyed hash of (full parent state, stream index). Calling
  // split(s) twice on the same parent yields the same child; distinct stream
  // indices yield statistically independent children.
  Rng split(std::uint64_t stream) const noexcept {
    std::uint64_t sm = state_[0] ^ rng_detail::rotl(stream, 17);
    sm ^= 0xD1B54A32D192ED03ULL * (stream + 1);
    std::uint64_t mixed = rng_detail::splitmix64(sm);
    std::uint64_t sm2 =
        mixed ^ state_[1] ^ rng_detail::rotl(state_[2], 29) ^ state_[3];
    return Rng(rng_detail::splitmix64(sm2));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result =
        rng_detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rng_detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) without modulo bias (bound >= 1).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() noexcept {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = (next_u64() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace riswie
