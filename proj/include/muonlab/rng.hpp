#pragma once

#include <cmath>
#include <cstdint>

namespace muonlab {

/// Counter-based generator built on splitmix64. Streams are derived from a
/// (seed, step, salt) key, so every (run, step) pair gets an independent,
/// platform-stable sequence; sweeps can run in parallel and stay
/// reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng for_stream(std::uint64_t seed, std::uint64_t step,
                        std::uint64_t salt = 0) {
    std::uint64_t key = mix(seed + 0x9e3779b97f4a7c15ULL);
    key = mix(key ^ mix(step + 0xbf58476d1ce4e5b9ULL));
    key = mix(key ^ mix(salt + 0x94d049bb133111ebULL));
    return Rng(key);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (avoids the implementation-defined
  /// std::normal_distribution so sequences are identical across platforms).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    while (u1 <= 0.0) u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace muonlab
