#ifndef SCANNEAL_RNG_HPP
#define SCANNEAL_RNG_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace scanneal {

// SplitMix64 finalizer. Stable across platforms; seed derivation feeds every
// reproducibility guarantee in this project, so it must never change.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream for (master, stream, index). Growing an index range
// leaves earlier indices untouched.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix64(mix64(mix64(master) ^ stream) ^ index);
}

// mt19937_64 with hand-rolled variate mappings. The standard fixes the raw
// engine output but not the distribution adaptors, so uniforms and normals
// go through explicit bit arithmetic to keep trajectories identical across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) by masked rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n - 1);
    for (;;) {
      const std::uint64_t v = next_u64() & mask;
      if (v < n) return v;
    }
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double standard_normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double random_pm1() { return uniform01() < 0.5 ? -1.0 : 1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace scanneal

#endif
