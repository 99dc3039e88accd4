#include "shdc/item_memory.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include "shdc/binary_io.hpp"
#include "shdc/errors.hpp"
#include "shdc/hv_ops.hpp"
#include "shdc/prng.hpp"

namespace shdc {

namespace {

constexpr char kMagic[4] = {'S', 'H', 'I', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

AtomicHv draw_atomic(SplitMix64& rng, const HvConfig& cfg) {
  AtomicHv hv;
  hv.positions.resize(cfg.segments);
  for (std::uint32_t s = 0; s < cfg.segments; ++s) {
    hv.positions[s] = static_cast<std::uint32_t>(rng.next_below(cfg.segment_length));
  }
  return hv;
}

void check_table_shape(const HvConfig& cfg, std::uint32_t num_channels, std::size_t num_entries,
                       std::size_t num_electrodes) {
  cfg.validate();
  if (num_channels == 0) {
    throw std::invalid_argument("item memory: num_channels must be >= 1");
  }
  if (num_entries != static_cast<std::size_t>(num_channels) * kLbpCodes) {
    throw std::invalid_argument("item memory: entry table has wrong size");
  }
  if (num_electrodes != num_channels) {
    throw std::invalid_argument("item memory: electrode table has wrong size");
  }
}

// Append `bits` low-order bits of `value` to an LSB-first bit stream.
struct BitWriter {
  std::vector<unsigned char> bytes;
  std::uint32_t pending = 0;
  std::uint32_t pending_bits = 0;

  void push(std::uint32_t value, std::uint32_t bits) {
    pending |= value << pending_bits;
    pending_bits += bits;
    while (pending_bits >= 8) {
      bytes.push_back(static_cast<unsigned char>(pending & 0xff));
      pending >>= 8;
      pending_bits -= 8;
    }
  }

  void flush() {
    if (pending_bits > 0) {
      bytes.push_back(static_cast<unsigned char>(pending & 0xff));
      pending = 0;
      pending_bits = 0;
    }
  }
};

struct BitReader {
  const std::vector<unsigned char>& bytes;
  std::size_t next_byte = 0;
  std::uint32_t pending = 0;
  std::uint32_t pending_bits = 0;

  std::uint32_t pull(std::uint32_t bits) {
    while (pending_bits < bits) {
      if (next_byte >= bytes.size()) throw data_error("item memory file: truncated positions");
      pending |= static_cast<std::uint32_t>(bytes[next_byte++]) << pending_bits;
      pending_bits += 8;
    }
    const std::uint32_t value = pending & ((1u << bits) - 1);
    pending >>= bits;
    pending_bits -= bits;
    return value;
  }
};

}  // namespace

CompressedItemMemory::CompressedItemMemory(HvConfig cfg, std::uint64_t seed,
                                           std::uint32_t num_channels,
                                           std::vector<AtomicHv> entries,
                                           std::vector<AtomicHv> electrodes)
    : cfg_(cfg),
      seed_(seed),
      num_channels_(num_channels),
      entries_(std::move(entries)),
      electrodes_(std::move(electrodes)) {
  check_table_shape(cfg_, num_channels_, entries_.size(), electrodes_.size());
  for (const AtomicHv& hv : entries_) validate_atomic(hv, cfg_);
  for (const AtomicHv& hv : electrodes_) validate_atomic(hv, cfg_);
}

CompressedItemMemory CompressedItemMemory::generate(std::uint64_t seed,
                                                    std::uint32_t num_channels,
                                                    const HvConfig& cfg) {
  cfg.validate();
  if (num_channels == 0) {
    throw std::invalid_argument("item memory: num_channels must be >= 1");
  }
  SplitMix64 rng(seed);
  std::vector<AtomicHv> entries;
  entries.reserve(static_cast<std::size_t>(num_channels) * kLbpCodes);
  for (std::uint32_t c = 0; c < num_channels; ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) entries.push_back(draw_atomic(rng, cfg));
  }
  std::vector<AtomicHv> electrodes;
  electrodes.reserve(num_channels);
  for (std::uint32_t c = 0; c < num_channels; ++c) electrodes.push_back(draw_atomic(rng, cfg));
  return CompressedItemMemory(cfg, seed, num_channels, std::move(entries), std::move(electrodes));
}

const AtomicHv& CompressedItemMemory::lookup(std::uint32_t channel, std::uint32_t code) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("item memory lookup: channel " + std::to_string(channel) +
                                " out of range");
  }
  if (code >= kLbpCodes) {
    throw std::invalid_argument("item memory lookup: code " + std::to_string(code) +
                                " out of range");
  }
  return entries_[static_cast<std::size_t>(channel) * kLbpCodes + code];
}

const AtomicHv& CompressedItemMemory::electrode(std::uint32_t channel) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("item memory electrode: channel " + std::to_string(channel) +
                                " out of range");
  }
  return electrodes_[channel];
}

std::uint32_t CompressedItemMemory::entry_payload_bits() const {
  return cfg_.segments * cfg_.position_bits();
}

void CompressedItemMemory::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw data_error("cannot open " + path.string() + " for writing");
  io::write_bytes(os, kMagic, 4);
  io::write_u32(os, kFormatVersion);
  io::write_u32(os, cfg_.dimension);
  io::write_u32(os, cfg_.segments);
  io::write_u32(os, cfg_.segment_length);
  io::write_u32(os, num_channels_);
  io::write_u64(os, seed_);

  const std::uint32_t bits = cfg_.position_bits();
  BitWriter writer;
  for (const AtomicHv& hv : entries_) {
    for (std::uint32_t p : hv.positions) writer.push(p, bits);
  }
  for (const AtomicHv& hv : electrodes_) {
    for (std::uint32_t p : hv.positions) writer.push(p, bits);
  }
  writer.flush();
  io::write_bytes(os, writer.bytes.data(), writer.bytes.size());
  if (!os) throw data_error("write failed for " + path.string());
}

CompressedItemMemory CompressedItemMemory::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw data_error("cannot open " + path.string());
  char magic[4];
  io::read_bytes(is, magic, 4);
  if (!std::equal(magic, magic + 4, kMagic)) {
    throw data_error(path.string() + ": not an item memory file");
  }
  const std::uint32_t version = io::read_u32(is);
  if (version != kFormatVersion) {
    throw data_error(path.string() + ": unsupported format version " + std::to_string(version));
  }
  const std::uint32_t dimension = io::read_u32(is);
  const std::uint32_t segments = io::read_u32(is);
  const std::uint32_t segment_length = io::read_u32(is);
  const std::uint32_t num_channels = io::read_u32(is);
  const std::uint64_t seed = io::read_u64(is);
  HvConfig cfg{dimension, segments, segment_length};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw data_error(path.string() + ": bad geometry: " + e.what());
  }
  if (num_channels == 0) throw data_error(path.string() + ": num_channels is zero");

  const std::uint32_t bits = cfg.position_bits();
  const std::size_t total_positions =
      (static_cast<std::size_t>(num_channels) * kLbpCodes + num_channels) * cfg.segments;
  const std::size_t payload_bytes = (total_positions * bits + 7) / 8;
  std::vector<unsigned char> payload(payload_bytes);
  io::read_bytes(is, payload.data(), payload.size());

  BitReader reader{payload};
  auto read_atomic = [&]() {
    AtomicHv hv;
    hv.positions.resize(cfg.segments);
    for (std::uint32_t s = 0; s < cfg.segments; ++s) {
      const std::uint32_t p = reader.pull(bits);
      if (p >= cfg.segment_length) {
        throw data_error(path.string() + ": position " + std::to_string(p) +
                         " exceeds segment length");
      }
      hv.positions[s] = p;
    }
    return hv;
  };
  std::vector<AtomicHv> entries;
  entries.reserve(static_cast<std::size_t>(num_channels) * kLbpCodes);
  for (std::uint32_t i = 0; i < num_channels * kLbpCodes; ++i) entries.push_back(read_atomic());
  std::vector<AtomicHv> electrodes;
  electrodes.reserve(num_channels);
  for (std::uint32_t i = 0; i < num_channels; ++i) electrodes.push_back(read_atomic());
  return CompressedItemMemory(cfg, seed, num_channels, std::move(entries), std::move(electrodes));
}

nlohmann::json CompressedItemMemory::debug_json() const {
  nlohmann::json j;
  j["dimension"] = cfg_.dimension;
  j["segments"] = cfg_.segments;
  j["segment_length"] = cfg_.segment_length;
  j["num_channels"] = num_channels_;
  j["seed"] = seed_;
  j["entry_payload_bits"] = entry_payload_bits();
  auto positions_of = [](const AtomicHv& hv) { return hv.positions; };
  nlohmann::json entries = nlohmann::json::array();
  for (std::uint32_t c = 0; c < num_channels_; ++c) {
    nlohmann::json table = nlohmann::json::array();
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) table.push_back(positions_of(lookup(c, v)));
    entries.push_back(std::move(table));
  }
  j["entries"] = std::move(entries);
  nlohmann::json electrodes = nlohmann::json::array();
  for (std::uint32_t c = 0; c < num_channels_; ++c) {
    electrodes.push_back(positions_of(electrode(c)));
  }
  j["electrodes"] = std::move(electrodes);
  return j;
}

ItemMemory::ItemMemory(HvConfig cfg, std::uint64_t seed, std::uint32_t num_channels,
                       std::vector<BinaryHv> entries, std::vector<BinaryHv> electrodes)
    : cfg_(cfg),
      seed_(seed),
      num_channels_(num_channels),
      entries_(std::move(entries)),
      electrodes_(std::move(electrodes)) {
  check_table_shape(cfg_, num_channels_, entries_.size(), electrodes_.size());
  for (const BinaryHv& hv : entries_) {
    if (hv.dimension() != cfg_.dimension) {
      throw std::invalid_argument("item memory: entry dimension mismatch");
    }
  }
  for (const BinaryHv& hv : electrodes_) {
    if (hv.dimension() != cfg_.dimension) {
      throw std::invalid_argument("item memory: electrode dimension mismatch");
    }
  }
}

ItemMemory ItemMemory::generate(std::uint64_t seed, std::uint32_t num_channels,
                                const HvConfig& cfg) {
  cfg.validate();
  if (num_channels == 0) {
    throw std::invalid_argument("item memory: num_channels must be >= 1");
  }
  SplitMix64 rng(seed);
  std::vector<BinaryHv> entries;
  entries.reserve(static_cast<std::size_t>(num_channels) * kLbpCodes);
  for (std::uint32_t c = 0; c < num_channels; ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) {
      entries.push_back(atomic_to_binary(draw_atomic(rng, cfg), cfg));
    }
  }
  std::vector<BinaryHv> electrodes;
  electrodes.reserve(num_channels);
  for (std::uint32_t c = 0; c < num_channels; ++c) {
    electrodes.push_back(atomic_to_binary(draw_atomic(rng, cfg), cfg));
  }
  return ItemMemory(cfg, seed, num_channels, std::move(entries), std::move(electrodes));
}

const BinaryHv& ItemMemory::lookup(std::uint32_t channel, std::uint32_t code) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("item memory lookup: channel " + std::to_string(channel) +
                                " out of range");
  }
  if (code >= kLbpCodes) {
    throw std::invalid_argument("item memory lookup: code " + std::to_string(code) +
                                " out of range");
  }
  return entries_[static_cast<std::size_t>(channel) * kLbpCodes + code];
}

const BinaryHv& ItemMemory::electrode(std::uint32_t channel) const {
  if (channel >= num_channels_) {
    throw std::invalid_argument("item memory electrode: channel " + std::to_string(channel) +
                                " out of range");
  }
  return electrodes_[channel];
}

void ItemMemory::set_entry(std::uint32_t channel, std::uint32_t code, BinaryHv hv) {
  if (channel >= num_channels_ || code >= kLbpCodes) {
    throw std::invalid_argument("item memory set_entry: index out of range");
  }
  if (hv.dimension() != cfg_.dimension) {
    throw std::invalid_argument("item memory set_entry: dimension mismatch");
  }
  entries_[static_cast<std::size_t>(channel) * kLbpCodes + code] = std::move(hv);
}

CompressedItemMemory compress(const ItemMemory& im) {
  const HvConfig& cfg = im.config();
  std::vector<AtomicHv> entries;
  entries.reserve(static_cast<std::size_t>(im.num_channels()) * kLbpCodes);
  for (std::uint32_t c = 0; c < im.num_channels(); ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) {
      entries.push_back(one_hot_decode(im.lookup(c, v), cfg));
    }
  }
  std::vector<AtomicHv> electrodes;
  electrodes.reserve(im.num_channels());
  for (std::uint32_t c = 0; c < im.num_channels(); ++c) {
    electrodes.push_back(one_hot_decode(im.electrode(c), cfg));
  }
  return CompressedItemMemory(cfg, im.seed(), im.num_channels(), std::move(entries),
                              std::move(electrodes));
}

ItemMemory expand(const CompressedItemMemory& cim) {
  const HvConfig& cfg = cim.config();
  std::vector<BinaryHv> entries;
  entries.reserve(static_cast<std::size_t>(cim.num_channels()) * kLbpCodes);
  for (std::uint32_t c = 0; c < cim.num_channels(); ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) {
      entries.push_back(atomic_to_binary(cim.lookup(c, v), cfg));
    }
  }
  std::vector<BinaryHv> electrodes;
  electrodes.reserve(cim.num_channels());
  for (std::uint32_t c = 0; c < cim.num_channels(); ++c) {
    electrodes.push_back(atomic_to_binary(cim.electrode(c), cfg));
  }
  return ItemMemory(cfg, cim.seed(), cim.num_channels(), std::move(entries),
                    std::move(electrodes));
}

}  // namespace shdc
