#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

namespace poisonlab {

// splitmix64 finalizer; used for seed mixing and child-stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random source. All randomness in the project flows through an
// explicit Rng; nothing reads ambient/global state.
//
// Streams are splittable: child({tags...}) derives a new independent stream
// from the *base seed* and the tag path only, never from how much of the
// parent stream has been consumed. That makes any random draw replayable
// from (seed, tag path) alone.
//
// Distribution helpers are implemented here rather than with std::
// distributions so that draws are bit-reproducible across standard library
// implementations (the mt19937_64 engine itself is pinned by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng child(std::initializer_list<std::uint64_t> tags) const {
    std::uint64_t s = seed_;
    for (std::uint64_t t : tags) s = mix64(s ^ mix64(t));
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n). Lemire multiply-with-rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_int(int n) { return static_cast<int>(uniform_index(static_cast<std::uint64_t>(n))); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform_real() < p; }

  // Box-Muller. No spare caching so the draw count per call is fixed.
  double normal(double mean = 0.0, double stddev = 1.0) {
    const double u1 = uniform_real();
    const double u2 = uniform_real();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace poisonlab
