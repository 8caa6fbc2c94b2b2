// krausflow — continuous isotropic spin-measurement simulator
// SPDX-License-Identifier: Apache-2.0
#ifndef KRAUSFLOW_RNG_HPP
#define KRAUSFLOW_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace krausflow {

/// Mixes a combined seed into a well-distributed 64-bit state (splitmix64).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d49d76ae3aa3dbULL;
  return x ^ (x >> 31);
}

/// Per-trajectory seed: master seed XOR trajectory index, mixed before use.
inline std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  return master ^ index;
}

/// Deterministic N(0,1) stream: mt19937_64 + Box-Muller on 53-bit uniforms.
/// Same seed gives the same sequence on any platform; std::normal_distribution
/// is implementation-defined and deliberately avoided.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // uniforms in (0,1): (k + 0.5) * 2^-53 with k drawn from 53 bits
    const double u1 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace krausflow

#endif
