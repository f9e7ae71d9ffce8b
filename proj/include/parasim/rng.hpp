#pragma once

// Deterministic random streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard; the bounded and real-valued draws below are implemented here
// rather than through <random> distributions, whose algorithms vary between
// standard libraries.  Streams are keyed by (seed, a, b) so that work split
// across threads draws the same numbers in any schedule.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace parasim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

__extension__ using uint128 = unsigned __int128;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (a * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ (b * 0x8cb92ba72f3d8dd7ULL));
    return Rng(h);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    uint128 m = static_cast<uint128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace parasim
