#pragma once

#include <cstdint>
#include <random>

namespace medchain {

// splitmix64 finalizer over (seed, index); used to derive per-episode and
// per-worker seeds so that derived streams never share state.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Seeded stream with a fully specified output sequence (mt19937_64 plus our own
// real-valued transforms; the std:: distributions are implementation-defined).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Inverse-CDF sample of the triangular distribution on [lo, hi] with the given mode.
  double triangular(double lo, double mode, double hi);

  RandomStream split(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace medchain
