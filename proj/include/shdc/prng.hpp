#pragma once

#include <cstdint>

namespace shdc {

// SplitMix64 (Steele/Lea/Vigna 2014 mixer constants). All design-time
// randomness in this project flows through this generator so that item
// memories and synthetic datasets regenerate bit-identically from a seed,
// on any platform. Do not change the constants or the draw order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw from [0, bound) via rejection sampling. std::uniform_int_
  // distribution is implementation-defined, so it is never used here.
  std::uint64_t next_below(std::uint64_t bound);

  // Inclusive range, lo <= hi.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

}  // namespace shdc
