#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace specband {

// SplitMix64 finalizer. Used to turn arbitrary 64-bit values into
// well-mixed seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for sub-stream `stream` of `base`. Replicate i of an experiment runs
// with derive_seed(base_seed, i); the derivation is part of the file-format
// contract (traces record the derived seed).
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::uint64_t stream) noexcept {
  return splitmix64(base ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

// Deterministic RNG with hand-rolled distributions. std::*_distribution is
// implementation-defined, which would tie byte-identical reproducibility to
// one standard library; the transforms below fix the output for a given seed
// everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0,1]; 53-bit resolution. Never returns 0, so log() and
  // strictly-positive weights are safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on (lo, hi].
  double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace specband
