#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ranksel {

/// SplitMix64 generator. Hand-rolled transforms keep sampled output
/// byte-identical across standard library implementations, which the
/// reproducibility contract requires.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1).
  double uniform_pos() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double gumbel(double beta) { return -beta * std::log(-std::log(uniform_pos())); }

  double normal(double sigma) {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t state_;
};

/// Derives an independent stream seed from (seed, stream index).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  Rng mix(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return mix.next();
}

}  // namespace ranksel
