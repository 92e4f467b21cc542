#pragma once

#include <cstdint>
#include <random>

namespace gct {

/// SplitMix64 finalizer; used to spread user seeds over the state space.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the index-th work item in a batch started from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Explicit random stream. Every stochastic routine takes one by reference;
/// there is no global generator.
///
/// Uniforms are built from the top 53 bits of mt19937_64 output so the
/// stream is bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Exponential with the given rate, by inversion; infinite for rate zero.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gct
