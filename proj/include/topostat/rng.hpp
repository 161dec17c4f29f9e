#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace topostat {

// SplitMix64 (Steele/Lea/Flood splittable generator). Streams are derived by
// mixing (seed, stream index) through the finalizer, so column streams and
// per-trial streams are independent of evaluation order and thread count.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double next_unit() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  // Box-Muller pair of independent standard normals.
  std::pair<double, double> next_normal_pair() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::uint64_t state_;
};

// Deterministic stream derivation: hash (seed, stream) into a fresh seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace topostat
