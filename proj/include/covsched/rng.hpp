#pragma once

#include <cstdint>

namespace covsched {

// Deterministic random stream: xoshiro256++ seeded through splitmix64.
// The standard library's engines are portable but its distributions are
// not, and every randomized result here must be bit-reproducible across
// platforms, so the uint64 -> double mapping is fixed too: the top 53 bits
// become a uniform double in [0, 1).
//
// Draw-order contract: callers that interleave several kinds of draws
// document the order themselves (e.g. the rounding schemes draw one opening
// uniform per closed machine in ascending machine order, then at most one
// assignment uniform per job).
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) {
    // splitmix64 expansion of the seed into the four lanes of state.
    std::uint64_t x = seed;
    for (auto& lane : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      lane = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer in [0, n). Modulo bias is irrelevant at lab scales
  // (n << 2^53) but we go through the double mapping so a single documented
  // draw is consumed either way.
  std::uint64_t below(std::uint64_t n) {
    const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(n));
    return k >= n ? n - 1 : k;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace covsched
