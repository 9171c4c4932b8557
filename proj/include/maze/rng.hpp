#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace maze {

// splitmix64 stream. The generator identity ("splitmix64") is part of the
// dataset manifest contract: a fixed seed regenerates identical datasets on
// any platform, so no standard-library distribution code is used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, n) by rejection sampling.
  std::uint64_t uniform_below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t cutoff = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= cutoff) return x % n;
    }
  }

  // [0,1) with 53 random bits.
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform_double(); }

  // Fisher-Yates; depends only on the seed and v.size().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Seed-splitting rule used by instance generation: one documented constant
// stream tag per phase, so sub-phases draw from disjoint streams.
inline constexpr std::uint64_t kSeedStreamWalls = 1;
inline constexpr std::uint64_t kSeedStreamCycles = 2;
inline constexpr std::uint64_t kSeedStreamTerminals = 3;

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
  return r.next_u64();
}

}  // namespace maze
