#pragma once

#include <cmath>
#include <cstdint>

namespace relbeam {

/// SplitMix64 step: advances the counter by the golden-gamma increment and
/// scrambles it through the murmur-style avalanche finalizer. Used both as a
/// seed decorrelator and as the draw function of RandomSource.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream: a SplitMix64 counter generator. Draws are
/// reproduced bit-for-bit for a given seed because the whole mapping down to
/// doubles is spelled out here, with no implementation-defined pieces.
///
/// Construction costs a few arithmetic instructions, which is the point:
/// simulations derive one stream per emitted particle, so seeding must be
/// (and is) as cheap as drawing.
///
/// A RandomSource is mutable and must not be shared between concurrent
/// callers. Parallel work splits via derive(): the stream for item `ordinal`
/// of a run seeded with `master` is the same no matter which worker draws it.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : state_(splitmix64(seed)) {}

  /// Independent stream for the `ordinal`-th item of the run seeded `master`.
  static RandomSource derive(std::uint64_t master, std::uint64_t ordinal) {
    return RandomSource(splitmix64(master) + ordinal);
  }

  std::uint64_t bits() { return splitmix64(state_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// True with probability p (p outside [0,1] saturates).
  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) { return bits() % n; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - uniform01() lies in (0, 1], keeping the log finite.
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
    const double angle = 2.0 * 3.14159265358979323846 * uniform01();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace relbeam
