#pragma once

#include <cstdint>
#include <random>

namespace teleop {

/// Named sub-streams drawn from one run seed, so adding a consumer never
/// shifts the draws of another.
enum class RngStream : std::uint32_t {
  kForwardChannel = 1,
  kBackwardChannel = 2,
  kOperator = 3,
  kTerrain = 4,
  kWeights = 5,
  kBatches = 6,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, RngStream stream, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform draw in [lo, hi). Written out instead of std::uniform_real_distribution
/// so logs are identical across standard library implementations.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace teleop
