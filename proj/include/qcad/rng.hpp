#pragma once

#include <cmath>
#include <cstdint>

namespace qcad {

/* splitmix64; used to expand seeds into full generator state. */
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/*
 * xoshiro256** generator.  Platform-independent sequences, period 2^256-1,
 * which keeps every run reproducible from a manifest seed no matter which
 * standard library the binary was built against.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /* Derives an independent stream, e.g. one per Monte Carlo trial. */
  static Rng substream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t sm = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /* Uniform double in [2^-53, 1); never returns 0 so log(u) is finite. */
  double uniform() {
    const std::uint64_t bits = next() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  /* Uniform integer in [0, bound); bound must be nonzero. */
  std::uint64_t below(std::uint64_t bound) {
    /* Lemire-style rejection to avoid modulo bias. */
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/*
 * Number of Bernoulli(p) slots to skip before the next success, i.e. a
 * geometric variate.  Returns a large sentinel when p == 0.
 */
inline std::uint64_t geometric_skip(Rng& rng, double log1m_p) {
  if (log1m_p >= 0.0) return ~0ull;  /* p == 0 */
  const double u = rng.uniform();
  const double skip = std::floor(std::log(u) / log1m_p);
  if (skip >= 9.0e18) return ~0ull;
  return static_cast<std::uint64_t>(skip);
}

}  // namespace qcad
