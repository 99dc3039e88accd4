#pragma once

// Bitwise operations on hypervectors: representation bridges, segmented
// circular-shift binding (both the position-arithmetic and the barrel-shifter
// datapath), bundling, thinning and overlap similarity.
//
// Shift convention: "shift by k" moves the bit at in-segment index i to
// index (i + k) mod L, so binding two atomic HVs adds their positions
// modulo L. Unbinding subtracts. Every operation here is a pure function.

#include <cstdint>
#include <span>

#include "shdc/errors.hpp"
#include "shdc/hv.hpp"

namespace shdc {

// Expands per-segment positions into the flat bit representation.
// popcount of the result equals cfg.segments.
BinaryHv atomic_to_binary(const AtomicHv& hv, const HvConfig& cfg);

// Inverse of atomic_to_binary. Throws malformed_atomic_error unless every
// segment holds exactly one 1-bit.
AtomicHv one_hot_decode(const BinaryHv& hv, const HvConfig& cfg);

// Binding in position space: result position = (shiftee + shifter) mod L
// per segment. Preserves the one-bit-per-segment structure.
AtomicHv bind_positions(const AtomicHv& shiftee, const AtomicHv& shifter,
                        const HvConfig& cfg);

// Inverse binding: result position = (bound - shifter) mod L per segment.
AtomicHv unbind_positions(const AtomicHv& bound, const AtomicHv& shifter,
                          const HvConfig& cfg);

// Binding in bit space: circularly shifts each segment of shiftee by the
// matching shift amount. Works for arbitrary segment contents. Bit-exact
// match with bind_positions after representation conversion.
// shift_amounts.size() must equal cfg.segments, each value < L.
BinaryHv bind_barrel(const BinaryHv& shiftee,
                     std::span<const std::uint32_t> shift_amounts,
                     const HvConfig& cfg);

// Counting bundling: output bit i = 1 iff at least `threshold` inputs have
// bit i set. threshold >= 1; threshold == 1 degenerates to bundle_or.
BinaryHv bundle_threshold(std::span<const BinaryHv> hvs, std::uint32_t threshold);

// Elementwise OR of all inputs.
BinaryHv bundle_or(std::span<const BinaryHv> hvs);

// Thinning: bit i = 1 iff acc.count(i) >= threshold. threshold in [1, 256];
// 256 always yields the zero vector because counters saturate at 255.
BinaryHv thin(const Accumulator& acc, std::uint32_t threshold);

// popcount(a AND b). Counts shared 1-bits only.
std::uint32_t overlap_similarity(const BinaryHv& a, const BinaryHv& b);

}  // namespace shdc
