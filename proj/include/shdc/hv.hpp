#pragma once

// Hypervector value types. A hypervector is a fixed-length bit string split
// into equal segments; the sparse variants carry exactly one 1-bit per
// segment and can therefore be stored either expanded (BinaryHv) or as the
// per-segment bit positions (AtomicHv).
//
// Bit layout: segment s occupies bits [s*L, (s+1)*L); bit index within a
// segment counts from 0. This layout is load-bearing for the cross-path
// equivalence tests and for the serialized formats.

#include <cstdint>
#include <span>
#include <vector>

namespace shdc {

// Shape of the hypervector space. dimension = segments * segment_length.
struct HvConfig {
  std::uint32_t dimension = 1024;
  std::uint32_t segments = 8;
  std::uint32_t segment_length = 128;

  // Derives segment_length from dimension/segments.
  static HvConfig make(std::uint32_t dimension, std::uint32_t segments);

  void validate() const;  // throws std::invalid_argument

  // Bits needed to store one in-segment position (7 for L=128).
  std::uint32_t position_bits() const;

  bool operator==(const HvConfig&) const = default;
};

// Flat binary hypervector, bit-packed into 64-bit words. Bits beyond
// dimension() in the last word are kept zero.
class BinaryHv {
 public:
  BinaryHv() = default;
  explicit BinaryHv(std::uint32_t dimension);

  std::uint32_t dimension() const { return dimension_; }
  std::size_t word_count() const { return words_.size(); }

  bool bit(std::uint32_t index) const;
  void set_bit(std::uint32_t index, bool value = true);

  std::uint32_t popcount() const;
  double density() const;
  void clear();

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  BinaryHv& operator|=(const BinaryHv& other);
  BinaryHv& operator&=(const BinaryHv& other);
  BinaryHv& operator^=(const BinaryHv& other);

  bool operator==(const BinaryHv&) const = default;

 private:
  std::uint32_t dimension_ = 0;
  std::vector<std::uint64_t> words_;
};

// Sparse hypervector with exactly one 1-bit per segment, stored as the
// in-segment bit positions. positions.size() == segments, each < L.
struct AtomicHv {
  std::vector<std::uint32_t> positions;

  bool operator==(const AtomicHv&) const = default;
};

// Throws std::invalid_argument if hv is not valid under cfg.
void validate_atomic(const AtomicHv& hv, const HvConfig& cfg);

// Per-element saturating 8-bit counters (the temporal bundling state; for
// the default 1024-bit space this is the 8192-bit accumulator register).
// Counters saturate at 255 and never wrap.
class Accumulator {
 public:
  Accumulator() = default;
  explicit Accumulator(std::uint32_t dimension);

  std::uint32_t dimension() const { return static_cast<std::uint32_t>(counts_.size()); }
  std::uint8_t count(std::uint32_t index) const { return counts_.at(index); }
  std::span<const std::uint8_t> counts() const { return counts_; }

  // counts[i] += bit i, saturating at 255. Throws on dimension mismatch.
  void add(const BinaryHv& hv);
  void reset();

 private:
  std::vector<std::uint8_t> counts_;
};

}  // namespace shdc
