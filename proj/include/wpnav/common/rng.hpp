#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace wpnav {

// Deterministic random stream. Every draw is derived from the raw 64-bit
// engine output so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller on two open-interval uniforms.
  double normal();

  // Index drawn from unnormalized nonnegative weights.
  int categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace wpnav
