#pragma once

#include <cstdint>
#include <random>

namespace terracut {

/// Seeded generator that can derive independent child streams, so every
/// consumer of randomness hangs off one configured seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Child generator for a named stream; the parent state is not advanced.
  Rng split(std::uint64_t stream) const;

  double normal(double mean = 0.0, double sd = 1.0);
  double uniform(double lo = 0.0, double hi = 1.0);
  std::size_t index(std::size_t bound);

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace terracut
