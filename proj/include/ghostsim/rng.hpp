#pragma once

#include <cstdint>
#include <utility>

#include "ghostsim/axis.hpp"

namespace ghostsim {

/// Identifies one realization of the stochastic source. The random stream is a
/// pure function of (master_seed, realization_index); distinct indices give
/// independent streams no matter which worker draws them, or in what order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// xoshiro256++ seeded per realization via splitmix64 over the SeedSpec.
/// Gaussian draws use an explicit Box-Muller so the byte-level stream does not
/// depend on the standard library implementation.
class RealizationRng {
 public:
  explicit RealizationRng(SeedSpec seed) {
    std::uint64_t m = seed.master_seed;
    const std::uint64_t h = detail::splitmix64(m);
    std::uint64_t s = h ^ (seed.realization_index * 0xD1B54A32D192ED03ull + 0x9E3779B97F4A7C15ull);
    for (auto& w : s_) w = detail::splitmix64(s);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in (0, 1].
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Independent standard normals via Box-Muller.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Circular complex Gaussian with <|z|^2> = 1.
  Complex circular_gaussian() {
    auto [a, b] = normal_pair();
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return Complex{a * inv_sqrt2, b * inv_sqrt2};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace ghostsim
