#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace airyedge {

// Counter-based generator keyed by (seed, stream). Output word i is a
// splitmix-style finalizer applied to seed-mixed state + i * golden; streams
// never share state, so parallel sampling is reproducible regardless of
// scheduling.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : counter_(0) {
    base_ = mix(seed + 0x9E3779B97F4A7C15ULL);
    base_ = mix(base_ ^ mix(stream + 0xBF58476D1CE4E5B9ULL));
  }

  uint64_t next_u64() { return at(counter_++); }

  // Pure counter access; does not advance the stream.
  uint64_t at(uint64_t counter) const {
    return mix(base_ + counter * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Gamma(shape, scale=1) by Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // chi with k degrees of freedom (k may be fractional).
  double chi(double k) { return std::sqrt(2.0 * gamma(0.5 * k)); }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  uint64_t base_;
  uint64_t counter_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace airyedge
