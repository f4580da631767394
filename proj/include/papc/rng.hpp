#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace papc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic random stream keyed by (seed, keys...). Each key tuple
/// gets its own mt19937_64 engine seeded through SplitMix64, so any
/// link's draws are independent of how many other links exist.
/// Conversions to reals are done here rather than through <random>
/// distributions, whose output is implementation-defined.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with unit mean.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

}  // namespace papc
