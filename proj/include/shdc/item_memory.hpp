#pragma once

// Item memories map (channel, 6-bit LBP code) pairs to sparse hypervectors
// fixed once at generation time. Two storage forms exist: the baseline form
// keeps full 1024-bit vectors, the compressed form keeps only the per-segment
// 1-bit positions (8 x 7 = 56 bits per entry). Both are produced from the
// same seeded draw sequence, so compressing the baseline memory or generating
// the compressed one directly yields identical contents.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shdc/hv.hpp"

#include "json.hpp"

namespace shdc {

// Number of distinct LBP codes, and therefore table entries per channel.
inline constexpr std::uint32_t kLbpCodes = 64;

class CompressedItemMemory {
 public:
  CompressedItemMemory(HvConfig cfg, std::uint64_t seed, std::uint32_t num_channels,
                       std::vector<AtomicHv> entries, std::vector<AtomicHv> electrodes);

  // Draws every entry position uniformly from [0, L) with SplitMix64(seed):
  // item entries first (channel-major, then code, then segment), electrode
  // vectors after, channel-major.
  static CompressedItemMemory generate(std::uint64_t seed, std::uint32_t num_channels,
                                       const HvConfig& cfg);

  const AtomicHv& lookup(std::uint32_t channel, std::uint32_t code) const;
  const AtomicHv& electrode(std::uint32_t channel) const;

  const HvConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t num_channels() const { return num_channels_; }

  // Storage cost of one table entry: segments * ceil(log2 segment_length).
  std::uint32_t entry_payload_bits() const;

  void save(const std::filesystem::path& path) const;
  static CompressedItemMemory load(const std::filesystem::path& path);
  nlohmann::json debug_json() const;

  bool operator==(const CompressedItemMemory& other) const = default;

 private:
  HvConfig cfg_;
  std::uint64_t seed_ = 0;
  std::uint32_t num_channels_ = 0;
  std::vector<AtomicHv> entries_;     // channel-major, code-major
  std::vector<AtomicHv> electrodes_;  // channel-major
};

class ItemMemory {
 public:
  ItemMemory(HvConfig cfg, std::uint64_t seed, std::uint32_t num_channels,
             std::vector<BinaryHv> entries, std::vector<BinaryHv> electrodes);

  // Same draw sequence as CompressedItemMemory::generate, materialized as
  // full binary vectors.
  static ItemMemory generate(std::uint64_t seed, std::uint32_t num_channels,
                             const HvConfig& cfg);

  const BinaryHv& lookup(std::uint32_t channel, std::uint32_t code) const;
  const BinaryHv& electrode(std::uint32_t channel) const;

  const HvConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t num_channels() const { return num_channels_; }

  // Test hook: overwrite one entry in place (e.g. to inject a malformed HV).
  void set_entry(std::uint32_t channel, std::uint32_t code, BinaryHv hv);

  bool operator==(const ItemMemory& other) const = default;

 private:
  HvConfig cfg_;
  std::uint64_t seed_ = 0;
  std::uint32_t num_channels_ = 0;
  std::vector<BinaryHv> entries_;
  std::vector<BinaryHv> electrodes_;
};

// Lossless conversions between the two forms. compress throws
// malformed_atomic_error if any entry is not one-hot per segment.
CompressedItemMemory compress(const ItemMemory& im);
ItemMemory expand(const CompressedItemMemory& cim);

}  // namespace shdc
