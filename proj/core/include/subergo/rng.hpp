#pragma once

#include <cstdint>
#include <string_view>

namespace subergo::rng {

// All randomness in the library flows through this one generator so that runs
// are reproducible across platforms and thread counts. Trajectory k of master
// seed s always draws from substream(s, k), regardless of which thread runs it.
inline constexpr std::string_view kGeneratorId = "splitmix64-substream-v1";

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (avalanche mix).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  double exponential(double rate);

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();

  // Gamma(shape, 1), shape > 0. Marsaglia-Tsang for shape >= 1, boosted below.
  double gamma(double shape);

 private:
  std::uint64_t state_;
};

// Substream k of master seed: a fresh splitmix64 state derived by avalanche.
inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed + kGolden * (k + 1));
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t k) {
  return SplitMix64(substream_seed(seed, k));
}

}  // namespace subergo::rng
