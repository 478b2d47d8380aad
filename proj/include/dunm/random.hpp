#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dunm {

// Named sub-streams so that every consumer of randomness (samplers,
// initializers, estimators) draws from an independent sequence even when the
// user supplies a single seed. Samplers are keyed by (seed, stream, epoch),
// which makes periodic resampling reproducible without serializing any
// generator state.
enum class RngStream : std::uint64_t {
  Xavier = 1,
  DomainSplit,
  Interface,
  Boundary,
  BallInterior,
  ErrorEval,
  HitOrMiss,
  Verify,
  Generic,
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= stream + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= splitmix64(s);
  s ^= counter + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= splitmix64(s);
  return h;
}

// mt19937_64 with hand-rolled output transforms. The standard pins down the
// engine but not the distributions, so uniform/normal are derived from raw
// bits here to keep results identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  Rng(std::uint64_t seed, RngStream stream, std::uint64_t counter = 0)
      : gen_(mix_seed(seed, static_cast<std::uint64_t>(stream), counter)) {}

  std::uint64_t bits() { return gen_(); }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal via Box-Muller (pairwise, second value cached)
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace dunm
