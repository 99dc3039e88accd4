#include "shdc/hv_ops.hpp"

#include <bit>
#include <string>
#include <vector>

namespace shdc {

BinaryHv atomic_to_binary(const AtomicHv& hv, const HvConfig& cfg) {
  validate_atomic(hv, cfg);
  BinaryHv out(cfg.dimension);
  for (std::uint32_t s = 0; s < cfg.segments; ++s) {
    out.set_bit(s * cfg.segment_length + hv.positions[s]);
  }
  return out;
}

AtomicHv one_hot_decode(const BinaryHv& hv, const HvConfig& cfg) {
  cfg.validate();
  if (hv.dimension() != cfg.dimension) {
    throw std::invalid_argument("one_hot_decode: dimension mismatch");
  }
  AtomicHv out;
  out.positions.resize(cfg.segments);
  for (std::uint32_t s = 0; s < cfg.segments; ++s) {
    const std::uint32_t base = s * cfg.segment_length;
    std::uint32_t found = 0;
    std::uint32_t pos = 0;
    if (cfg.segment_length % 64 == 0 && base % 64 == 0) {
      const auto words = hv.words();
      const std::uint32_t w0 = base / 64;
      const std::uint32_t nw = cfg.segment_length / 64;
      for (std::uint32_t wi = 0; wi < nw; ++wi) {
        std::uint64_t w = words[w0 + wi];
        while (w != 0) {
          pos = wi * 64 + static_cast<std::uint32_t>(std::countr_zero(w));
          ++found;
          if (found > 1) break;
          w &= w - 1;
        }
        if (found > 1) break;
      }
    } else {
      for (std::uint32_t i = 0; i < cfg.segment_length; ++i) {
        if (hv.bit(base + i)) {
          pos = i;
          ++found;
          if (found > 1) break;
        }
      }
    }
    if (found != 1) {
      throw malformed_atomic_error("one_hot_decode: segment " + std::to_string(s) +
                                   (found == 0 ? " has no 1-bit" : " has multiple 1-bits"));
    }
    out.positions[s] = pos;
  }
  return out;
}

AtomicHv bind_positions(const AtomicHv& shiftee, const AtomicHv& shifter, const HvConfig& cfg) {
  validate_atomic(shiftee, cfg);
  validate_atomic(shifter, cfg);
  AtomicHv out;
  out.positions.resize(cfg.segments);
  for (std::uint32_t s = 0; s < cfg.segments; ++s) {
    out.positions[s] = (shiftee.positions[s] + shifter.positions[s]) % cfg.segment_length;
  }
  return out;
}

AtomicHv unbind_positions(const AtomicHv& bound, const AtomicHv& shifter, const HvConfig& cfg) {
  validate_atomic(bound, cfg);
  validate_atomic(shifter, cfg);
  AtomicHv out;
  out.positions.resize(cfg.segments);
  for (std::uint32_t s = 0; s < cfg.segments; ++s) {
    out.positions[s] =
        (bound.positions[s] + cfg.segment_length - shifter.positions[s]) % cfg.segment_length;
  }
  return out;
}

namespace {

// Circular shift of one word-aligned segment: bit i -> bit (i + k) mod L.
void rotate_segment_words(std::span<const std::uint64_t> in, std::span<std::uint64_t> out,
                          std::uint32_t word_base, std::uint32_t num_words, std::uint32_t k) {
  const std::uint32_t word_shift = k / 64;
  const std::uint32_t bit_shift = k % 64;
  for (std::uint32_t j = 0; j < num_words; ++j) {
    // Output word j takes its low part from input word (j - word_shift) and,
    // when bit_shift > 0, its carry-in from the word below that.
    const std::uint32_t src = (j + num_words - word_shift) % num_words;
    const std::uint32_t src_lo = (src + num_words - 1) % num_words;
    std::uint64_t w = in[word_base + src] << bit_shift;
    if (bit_shift != 0) w |= in[word_base + src_lo] >> (64 - bit_shift);
    out[word_base + j] = w;
  }
}

}  // namespace

BinaryHv bind_barrel(const BinaryHv& shiftee, std::span<const std::uint32_t> shift_amounts,
                     const HvConfig& cfg) {
  cfg.validate();
  if (shiftee.dimension() != cfg.dimension) {
    throw std::invalid_argument("bind_barrel: dimension mismatch");
  }
  if (shift_amounts.size() != cfg.segments) {
    throw std::invalid_argument("bind_barrel: expected one shift amount per segment");
  }
  for (std::uint32_t k : shift_amounts) {
    if (k >= cfg.segment_length) {
      throw std::invalid_argument("bind_barrel: shift amount " + std::to_string(k) +
                                  " not below segment length");
    }
  }
  BinaryHv out(cfg.dimension);
  const std::uint32_t L = cfg.segment_length;
  if (L % 64 == 0) {
    const std::uint32_t words_per_segment = L / 64;
    for (std::uint32_t s = 0; s < cfg.segments; ++s) {
      rotate_segment_words(shiftee.words(), out.words(), s * words_per_segment,
                           words_per_segment, shift_amounts[s]);
    }
  } else {
    for (std::uint32_t s = 0; s < cfg.segments; ++s) {
      const std::uint32_t base = s * L;
      for (std::uint32_t i = 0; i < L; ++i) {
        if (shiftee.bit(base + i)) out.set_bit(base + (i + shift_amounts[s]) % L);
      }
    }
  }
  return out;
}

BinaryHv bundle_threshold(std::span<const BinaryHv> hvs, std::uint32_t threshold) {
  if (hvs.empty()) throw std::invalid_argument("bundle_threshold: empty input list");
  if (threshold == 0) throw std::invalid_argument("bundle_threshold: threshold must be positive");
  const std::uint32_t dim = hvs.front().dimension();
  std::vector<std::uint32_t> counts(dim, 0);
  for (const BinaryHv& hv : hvs) {
    if (hv.dimension() != dim) throw std::invalid_argument("bundle_threshold: dimension mismatch");
    const auto words = hv.words();
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      std::uint64_t w = words[wi];
      while (w != 0) {
        counts[wi * 64 + std::countr_zero(w)]++;
        w &= w - 1;
      }
    }
  }
  BinaryHv out(dim);
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (counts[i] >= threshold) out.set_bit(i);
  }
  return out;
}

BinaryHv bundle_or(std::span<const BinaryHv> hvs) {
  if (hvs.empty()) throw std::invalid_argument("bundle_or: empty input list");
  BinaryHv out = hvs.front();
  for (std::size_t i = 1; i < hvs.size(); ++i) out |= hvs[i];
  return out;
}

BinaryHv thin(const Accumulator& acc, std::uint32_t threshold) {
  if (threshold < 1 || threshold > 256) {
    throw std::invalid_argument("thin: threshold must be in [1, 256]");
  }
  BinaryHv out(acc.dimension());
  const auto counts = acc.counts();
  for (std::uint32_t i = 0; i < acc.dimension(); ++i) {
    if (counts[i] >= threshold) out.set_bit(i);
  }
  return out;
}

std::uint32_t overlap_similarity(const BinaryHv& a, const BinaryHv& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("overlap_similarity: dimension mismatch");
  }
  std::uint32_t total = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    total += static_cast<std::uint32_t>(std::popcount(wa[i] & wb[i]));
  }
  return total;
}

}  // namespace shdc
