#pragma once

#include <cstdint>
#include <random>

namespace gridmul {

/// splitmix64 finalizer; used to derive independent sub-streams from a base
/// seed so concurrent trials never share generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

/// Seeded uniform generator with a pinned bits-to-double mapping, so the same
/// seed produces bit-identical values on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double range(double lo, double hi) { return lo + unit() * (hi - lo); }

  /// Magnitude uniform on [lo, hi) with a random sign.
  double signed_range(double lo, double hi) {
    const double magnitude = range(lo, hi);
    return (engine_() & 1u) ? magnitude : -magnitude;
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(unit() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridmul
