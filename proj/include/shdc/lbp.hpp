#pragma once

// Local binary pattern encoding of a raw sample stream. A 7-sample sliding
// window yields 6 consecutive-pair comparisons; bit k of the code is 1 iff
// sample[k+1] > sample[k] (ties give 0), with the oldest comparison in the
// LSB. One code is produced per sample once the window is full.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

namespace shdc {

inline constexpr std::uint32_t kLbpWindow = 7;
inline constexpr std::uint32_t kLbpBits = kLbpWindow - 1;

// One-shot form over a complete window, oldest sample first.
inline std::uint8_t lbp_window(std::span<const std::int32_t> window) {
  if (window.size() != kLbpWindow) {
    throw std::invalid_argument("lbp_window: expected exactly 7 samples");
  }
  std::uint8_t code = 0;
  for (std::uint32_t k = 0; k < kLbpBits; ++k) {
    if (window[k + 1] > window[k]) code |= static_cast<std::uint8_t>(1u << k);
  }
  return code;
}

// Incremental form: each new sample appends one comparison at the MSB while
// the previous comparisons shift toward the LSB, so a full recompute of the
// window is never needed. Returns a code only once 7 samples have been seen.
class LbpEncoder {
 public:
  std::optional<std::uint8_t> push(std::int32_t sample) {
    if (seen_ > 0) {
      const std::uint8_t newest = sample > last_ ? 1 : 0;
      code_ = static_cast<std::uint8_t>((code_ >> 1) | (newest << (kLbpBits - 1)));
    }
    last_ = sample;
    if (seen_ < kLbpWindow) ++seen_;
    if (seen_ < kLbpWindow) return std::nullopt;
    return code_;
  }

  bool warm() const { return seen_ >= kLbpWindow; }

  void reset() {
    code_ = 0;
    last_ = 0;
    seen_ = 0;
  }

 private:
  std::uint8_t code_ = 0;
  std::int32_t last_ = 0;
  std::uint32_t seen_ = 0;
};

}  // namespace shdc
