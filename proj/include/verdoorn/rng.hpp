#pragma once

#include <cstdint>
#include <random>

#include "verdoorn/numerics.hpp"

namespace verdoorn {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule for replication studies: replication r of a study with
// master seed m runs on splitmix64(m + (r+1) * gamma). The stride is odd, so
// distinct replications can never collide.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * kSplitMixGamma);
}

// mt19937_64 with inverse-transform sampling. Both the generator and the
// normal quantile are pinned by this codebase, so streams are reproducible
// across platforms (std::normal_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0,1).
  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * quantile_normal(uniform01());
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace verdoorn
