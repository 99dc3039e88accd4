#include "shdc/hv.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace shdc {

HvConfig HvConfig::make(std::uint32_t dimension, std::uint32_t segments) {
  if (segments == 0 || dimension == 0 || dimension % segments != 0) {
    throw std::invalid_argument("HvConfig: dimension must be a positive multiple of segments");
  }
  HvConfig cfg{dimension, segments, dimension / segments};
  cfg.validate();
  return cfg;
}

void HvConfig::validate() const {
  if (dimension == 0 || segments == 0 || segment_length == 0) {
    throw std::invalid_argument("HvConfig: all fields must be positive");
  }
  if (static_cast<std::uint64_t>(segments) * segment_length != dimension) {
    throw std::invalid_argument("HvConfig: dimension != segments * segment_length");
  }
}

std::uint32_t HvConfig::position_bits() const {
  return segment_length <= 1 ? 0 : std::bit_width(segment_length - 1);
}

BinaryHv::BinaryHv(std::uint32_t dimension)
    : dimension_(dimension), words_((dimension + 63) / 64, 0) {}

bool BinaryHv::bit(std::uint32_t index) const {
  if (index >= dimension_) {
    throw std::out_of_range("BinaryHv::bit: index " + std::to_string(index) +
                            " out of range for dimension " + std::to_string(dimension_));
  }
  return (words_[index / 64] >> (index % 64)) & 1u;
}

void BinaryHv::set_bit(std::uint32_t index, bool value) {
  if (index >= dimension_) {
    throw std::out_of_range("BinaryHv::set_bit: index " + std::to_string(index) +
                            " out of range for dimension " + std::to_string(dimension_));
  }
  const std::uint64_t mask = 1ULL << (index % 64);
  if (value) {
    words_[index / 64] |= mask;
  } else {
    words_[index / 64] &= ~mask;
  }
}

std::uint32_t BinaryHv::popcount() const {
  std::uint32_t total = 0;
  for (std::uint64_t w : words_) total += static_cast<std::uint32_t>(std::popcount(w));
  return total;
}

double BinaryHv::density() const {
  if (dimension_ == 0) return 0.0;
  return static_cast<double>(popcount()) / dimension_;
}

void BinaryHv::clear() {
  for (auto& w : words_) w = 0;
}

namespace {
void require_same_dimension(const BinaryHv& a, const BinaryHv& b, const char* op) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()) + ")");
  }
}
}  // namespace

BinaryHv& BinaryHv::operator|=(const BinaryHv& other) {
  require_same_dimension(*this, other, "BinaryHv::operator|=");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BinaryHv& BinaryHv::operator&=(const BinaryHv& other) {
  require_same_dimension(*this, other, "BinaryHv::operator&=");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BinaryHv& BinaryHv::operator^=(const BinaryHv& other) {
  require_same_dimension(*this, other, "BinaryHv::operator^=");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

void validate_atomic(const AtomicHv& hv, const HvConfig& cfg) {
  cfg.validate();
  if (hv.positions.size() != cfg.segments) {
    throw std::invalid_argument("AtomicHv: expected " + std::to_string(cfg.segments) +
                                " positions, got " + std::to_string(hv.positions.size()));
  }
  for (std::uint32_t p : hv.positions) {
    if (p >= cfg.segment_length) {
      throw std::invalid_argument("AtomicHv: position " + std::to_string(p) +
                                  " out of range for segment length " +
                                  std::to_string(cfg.segment_length));
    }
  }
}

Accumulator::Accumulator(std::uint32_t dimension) : counts_(dimension, 0) {}

void Accumulator::add(const BinaryHv& hv) {
  if (hv.dimension() != dimension()) {
    throw std::invalid_argument("Accumulator::add: dimension mismatch");
  }
  const auto words = hv.words();
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    std::uint64_t w = words[wi];
    while (w != 0) {
      const std::uint32_t bit = static_cast<std::uint32_t>(std::countr_zero(w));
      auto& c = counts_[wi * 64 + bit];
      if (c != 0xff) ++c;
      w &= w - 1;
    }
  }
}

void Accumulator::reset() {
  for (auto& c : counts_) c = 0;
}

}  // namespace shdc
