#include "shdc/dense.hpp"

#include <bit>
#include <stdexcept>
#include <string>
#include <utility>

#include "shdc/hv_ops.hpp"
#include "shdc/item_memory.hpp"
#include "shdc/prng.hpp"

namespace shdc {

namespace {

BinaryHv draw_dense(SplitMix64& rng, std::uint32_t dimension) {
  BinaryHv hv(dimension);
  auto words = hv.words();
  for (auto& w : words) w = rng.next();
  const std::uint32_t tail = dimension % 64;
  if (tail != 0) words[words.size() - 1] &= (std::uint64_t{1} << tail) - 1;
  return hv;
}

}  // namespace

DenseItemMemory::DenseItemMemory(std::uint64_t seed, std::uint32_t num_channels,
                                 std::uint32_t dimension, std::vector<BinaryHv> entries,
                                 std::vector<BinaryHv> electrodes)
    : seed_(seed),
      num_channels_(num_channels),
      dimension_(dimension),
      entries_(std::move(entries)),
      electrodes_(std::move(electrodes)) {
  if (num_channels_ == 0) throw std::invalid_argument("dense item memory: no channels");
  if (dimension_ == 0) throw std::invalid_argument("dense item memory: zero dimension");
  if (entries_.size() != static_cast<std::size_t>(num_channels_) * kLbpCodes ||
      electrodes_.size() != num_channels_) {
    throw std::invalid_argument("dense item memory: table has wrong size");
  }
  for (const BinaryHv& hv : entries_) {
    if (hv.dimension() != dimension_) {
      throw std::invalid_argument("dense item memory: entry dimension mismatch");
    }
  }
  for (const BinaryHv& hv : electrodes_) {
    if (hv.dimension() != dimension_) {
      throw std::invalid_argument("dense item memory: electrode dimension mismatch");
    }
  }
}

DenseItemMemory DenseItemMemory::generate(std::uint64_t seed, std::uint32_t num_channels,
                                          std::uint32_t dimension) {
  if (num_channels == 0) throw std::invalid_argument("dense item memory: no channels");
  if (dimension == 0) throw std::invalid_argument("dense item memory: zero dimension");
  SplitMix64 rng(seed);
  std::vector<BinaryHv> entries;
  entries.reserve(static_cast<std::size_t>(num_channels) * kLbpCodes);
  for (std::uint32_t c = 0; c < num_channels; ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) entries.push_back(draw_dense(rng, dimension));
  }
  std::vector<BinaryHv> electrodes;
  electrodes.reserve(num_channels);
  for (std::uint32_t c = 0; c < num_channels; ++c) electrodes.push_back(draw_dense(rng, dimension));
  return DenseItemMemory(seed, num_channels, dimension, std::move(entries),
                         std::move(electrodes));
}

const BinaryHv& DenseItemMemory::lookup(std::uint32_t channel, std::uint32_t code) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("dense item memory lookup: channel " + std::to_string(channel) +
                                " out of range");
  }
  if (code >= kLbpCodes) {
    throw std::invalid_argument("dense item memory lookup: code " + std::to_string(code) +
                                " out of range");
  }
  return entries_[static_cast<std::size_t>(channel) * kLbpCodes + code];
}

const BinaryHv& DenseItemMemory::electrode(std::uint32_t channel) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("dense item memory electrode: channel " +
                                std::to_string(channel) + " out of range");
  }
  return electrodes_[channel];
}

BinaryHv xor_bind(const BinaryHv& a, const BinaryHv& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("xor_bind: dimension mismatch");
  }
  BinaryHv out = a;
  out ^= b;
  return out;
}

BinaryHv majority_bundle(std::span<const BinaryHv> hvs) {
  if (hvs.empty()) throw std::invalid_argument("majority_bundle: empty input list");
  const auto k = static_cast<std::uint32_t>(hvs.size());
  return bundle_threshold(hvs, k / 2 + 1);
}

std::uint32_t hamming_distance(const BinaryHv& a, const BinaryHv& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("hamming_distance: dimension mismatch");
  }
  std::uint32_t total = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    total += static_cast<std::uint32_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return total;
}

}  // namespace shdc
