#pragma once

#include <cmath>
#include <cstdint>

namespace mfg {

// Counter-based generator: every draw is a pure function of (seed, keys),
// so streams are stable across platforms and replayable per (vehicle,
// step) without shared state.
struct CounterRng {
  std::uint64_t seed = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t raw(std::uint64_t k1, std::uint64_t k2 = 0, std::uint64_t k3 = 0) const {
    std::uint64_t h = mix(seed ^ 0x2545f4914f6cdd1dULL);
    h = mix(h ^ k1);
    h = mix(h ^ k2);
    h = mix(h ^ k3);
    return h;
  }

  // uniform in [0, 1)
  double uniform(std::uint64_t k1, std::uint64_t k2 = 0, std::uint64_t k3 = 0) const {
    return static_cast<double>(raw(k1, k2, k3) >> 11) * 0x1.0p-53;
  }

  double uniform_range(double lo, double hi, std::uint64_t k1, std::uint64_t k2 = 0,
                       std::uint64_t k3 = 0) const {
    return lo + (hi - lo) * uniform(k1, k2, k3);
  }

  // standard normal via Box-Muller on two decorrelated uniforms
  double normal(std::uint64_t k1, std::uint64_t k2 = 0, std::uint64_t k3 = 0) const {
    const double u1 = uniform(k1, k2, k3 * 2 + 1);
    const double u2 = uniform(k1, k2, k3 * 2 + 2);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace mfg
