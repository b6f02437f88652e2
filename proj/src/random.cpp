#include "medchain/random.hpp"

#include <cmath>

namespace medchain {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RandomStream::triangular(double lo, double mode, double hi) {
  if (hi <= lo) return lo;
  const double u = uniform01();
  const double split = (mode - lo) / (hi - lo);
  if (u < split) return lo + std::sqrt(u * (hi - lo) * (mode - lo));
  return hi - std::sqrt((1.0 - u) * (hi - lo) * (hi - mode));
}

}  // namespace medchain
