#pragma once

// Dense HDC reference path: 50%-density item memories, XOR binding and
// majority bundling. It exists to give the cost model a conventional dense
// design to compare the sparse variants against; it is not an accuracy
// baseline.

#include <cstdint>
#include <span>
#include <vector>

#include "shdc/hv.hpp"

namespace shdc {

class DenseItemMemory {
 public:
  DenseItemMemory(std::uint64_t seed, std::uint32_t num_channels, std::uint32_t dimension,
                  std::vector<BinaryHv> entries, std::vector<BinaryHv> electrodes);

  // Every bit of every entry is an independent fair coin from SplitMix64:
  // item entries first (channel-major, then code), electrodes after.
  static DenseItemMemory generate(std::uint64_t seed, std::uint32_t num_channels,
                                  std::uint32_t dimension);

  const BinaryHv& lookup(std::uint32_t channel, std::uint32_t code) const;
  const BinaryHv& electrode(std::uint32_t channel) const;

  std::uint64_t seed() const { return seed_; }
  std::uint32_t num_channels() const { return num_channels_; }
  std::uint32_t dimension() const { return dimension_; }

  bool operator==(const DenseItemMemory&) const = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint32_t num_channels_ = 0;
  std::uint32_t dimension_ = 0;
  std::vector<BinaryHv> entries_;     // channel-major, code-major
  std::vector<BinaryHv> electrodes_;  // channel-major
};

// Elementwise XOR; self-inverse, so xor_bind(xor_bind(a, b), b) == a.
BinaryHv xor_bind(const BinaryHv& a, const BinaryHv& b);

// Strict majority: bit set iff at least ceil((k+1)/2) of the k inputs set it,
// which breaks even-k ties toward 0.
BinaryHv majority_bundle(std::span<const BinaryHv> hvs);

std::uint32_t hamming_distance(const BinaryHv& a, const BinaryHv& b);

}  // namespace shdc
