#include "shdc/cost_sim.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include "shdc/hv_ops.hpp"
#include "shdc/prng.hpp"

namespace shdc {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// Exact toggle count between two equally sized byte buffers, eight bytes at
// a time.
std::uint64_t buffer_toggles(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::uint64_t total = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t x;
    std::uint64_t y;
    std::memcpy(&x, a + i, 8);
    std::memcpy(&y, b + i, 8);
    total += std::popcount(x ^ y);
  }
  for (; i < n; ++i) {
    total += std::popcount(static_cast<unsigned>(a[i] ^ b[i]) & 0xffu);
  }
  return total;
}

// Toggle count between two atomic HVs given as position arrays: two bits per
// differing segment.
std::uint64_t atomic_toggles(std::span<const std::uint32_t> a,
                             std::span<const std::uint32_t> b) {
  std::uint64_t differing = 0;
  for (std::size_t s = 0; s < a.size(); ++s) differing += a[s] != b[s] ? 1 : 0;
  return 2 * differing;
}

std::uint64_t position_bit_toggles(std::span<const std::uint32_t> a,
                                   std::span<const std::uint32_t> b) {
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < a.size(); ++s) total += std::popcount(a[s] ^ b[s]);
  return total;
}

void atomic_to_hv(std::span<const std::uint32_t> positions, const HvConfig& hv,
                  BinaryHv& out) {
  out.clear();
  for (std::uint32_t s = 0; s < hv.segments; ++s) {
    out.set_bit(s * hv.segment_length + positions[s]);
  }
}

}  // namespace

CostSimulator::CostSimulator(const PipelineConfig& cfg, const CompressedItemMemory& cim)
    : cfg_(cfg), cim_(cim) {
  cfg_.validate();
  require(cfg_.variant != Variant::dense,
          "cost simulator: dense config needs a dense item memory");
  require(cim.num_channels() == cfg_.num_channels,
          "cost simulator: item memory channel count does not match config");
  require(cim.config() == cfg_.hv,
          "cost simulator: item memory HV geometry does not match config");
  init_state();
}

CostSimulator::CostSimulator(const PipelineConfig& cfg, const DenseItemMemory& dim)
    : cfg_(cfg), dim_(dim) {
  cfg_.validate();
  require(cfg_.variant == Variant::dense,
          "cost simulator: sparse config needs a compressed item memory");
  require(dim.num_channels() == cfg_.num_channels,
          "cost simulator: item memory channel count does not match config");
  require(dim.dimension() == cfg_.hv.dimension,
          "cost simulator: item memory dimension does not match config");
  init_state();
}

void CostSimulator::init_state() {
  const std::uint32_t channels = cfg_.num_channels;
  const std::uint32_t dim = cfg_.hv.dimension;
  const std::uint32_t segments = cfg_.hv.segments;
  const std::uint32_t pos_bits = cfg_.hv.position_bits();

  spatial_out_ = BinaryHv(dim);
  frame_hv_ = BinaryHv(dim);
  acc_ = Accumulator(dim);
  scratch_.assign(dim, 0);
  bind_hv_.assign(channels, BinaryHv(dim));

  switch (cfg_.variant) {
    case Variant::sparse_baseline:
      im_pos_.assign(std::size_t{channels} * segments, 0);
      bind_pos_.assign(std::size_t{channels} * segments, 0);
      barrel_pos_.assign(std::size_t{channels} * (pos_bits - 1) * segments, 0);
      ledger_.im_output_bits = std::uint64_t{channels} * dim;
      break;
    case Variant::sparse_optimized:
      im_pos_.assign(std::size_t{channels} * segments, 0);
      bind_pos_.assign(std::size_t{channels} * segments, 0);
      ledger_.im_output_bits = std::uint64_t{channels} * segments * pos_bits;
      break;
    case Variant::dense:
      im_hv_.assign(channels, BinaryHv(dim));
      ledger_.im_output_bits = std::uint64_t{channels} * dim;
      break;
  }

  // Bundling tree levels over the channel axis, halving until two nodes are
  // left for the OR tree (its root is the spatial output register itself) or
  // one for the counting trees (their root sums feed a separate thresholded
  // output register).
  if (cfg_.variant == Variant::sparse_optimized) {
    for (std::uint32_t n = channels / 2 + channels % 2; n >= 2;
         n = n / 2 + n % 2) {
      or_tree_.emplace_back(n, BinaryHv(dim));
      if (n == 2) break;
    }
  } else {
    for (std::uint32_t n = channels / 2 + channels % 2;;
         n = n / 2 + n % 2) {
      count_tree_.emplace_back(std::size_t{n} * dim, 0);
      if (n == 1) break;
    }
  }
}

void CostSimulator::set_associative_memory(const AssociativeMemory& am) {
  const bool am_dense = am.variant == Variant::dense;
  const bool cfg_dense = cfg_.variant == Variant::dense;
  require(am_dense == cfg_dense,
          "cost simulator: associative memory variant does not match config");
  require(am.nonseizure.dimension() == cfg_.hv.dimension &&
              am.seizure.dimension() == cfg_.hv.dimension,
          "cost simulator: associative memory dimension does not match config");
  am_ = am;
}

void CostSimulator::step(std::span<const std::uint8_t> codes) {
  require(codes.size() == cfg_.num_channels,
          "cost simulator: one code per channel expected");
  switch (cfg_.variant) {
    case Variant::sparse_baseline: step_sparse_baseline(codes); break;
    case Variant::sparse_optimized: step_sparse_optimized(codes); break;
    case Variant::dense: step_dense(codes); break;
  }
  finish_cycle();
}

void CostSimulator::step_sparse_baseline(std::span<const std::uint8_t> codes) {
  const std::uint32_t segments = cfg_.hv.segments;
  const std::uint32_t seg_len = cfg_.hv.segment_length;
  const std::uint32_t pos_bits = cfg_.hv.position_bits();

  for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
    const AtomicHv& entry = cim_->lookup(c, codes[c]);
    const AtomicHv& electrode = cim_->electrode(c);
    std::span<std::uint32_t> im_pos{im_pos_.data() + std::size_t{c} * segments, segments};
    std::span<std::uint32_t> bind_pos{bind_pos_.data() + std::size_t{c} * segments,
                                      segments};

    // IM read-out register (full 1024-bit entry) and the one-hot-to-position
    // encoder outputs that drive the shifters.
    ledger_.add(CostModule::item_memory, atomic_toggles(im_pos, entry.positions));
    ledger_.add(CostModule::binding, position_bit_toggles(im_pos, entry.positions));
    std::copy(entry.positions.begin(), entry.positions.end(), im_pos.begin());

    // Barrel pipeline: stage s has applied the shift amount's low s+1 bits;
    // the final stage is the bind output register.
    std::uint64_t barrel_toggles = 0;
    for (std::uint32_t stage = 0; stage + 1 < pos_bits; ++stage) {
      const std::uint32_t mask = (1u << (stage + 1)) - 1;
      std::span<std::uint32_t> reg{
          barrel_pos_.data() + (std::size_t{c} * (pos_bits - 1) + stage) * segments,
          segments};
      for (std::uint32_t s = 0; s < segments; ++s) {
        const std::uint32_t next = (electrode.positions[s] + (im_pos[s] & mask)) % seg_len;
        if (next != reg[s]) barrel_toggles += 2;
        reg[s] = next;
      }
    }
    std::uint64_t bind_toggles = 0;
    for (std::uint32_t s = 0; s < segments; ++s) {
      const std::uint32_t next = (electrode.positions[s] + im_pos[s]) % seg_len;
      if (next != bind_pos[s]) bind_toggles += 2;
      bind_pos[s] = next;
    }
    ledger_.add(CostModule::binding, barrel_toggles + bind_toggles);
    atomic_to_hv(bind_pos, cfg_.hv, bind_hv_[c]);
  }
  step_count_tree(*cfg_.spatial_threshold);
}

void CostSimulator::step_sparse_optimized(std::span<const std::uint8_t> codes) {
  const std::uint32_t segments = cfg_.hv.segments;
  const std::uint32_t seg_len = cfg_.hv.segment_length;
  const std::uint32_t dim = cfg_.hv.dimension;

  for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
    const AtomicHv& entry = cim_->lookup(c, codes[c]);
    const AtomicHv& electrode = cim_->electrode(c);
    std::span<std::uint32_t> im_pos{im_pos_.data() + std::size_t{c} * segments, segments};
    std::span<std::uint32_t> bind_pos{bind_pos_.data() + std::size_t{c} * segments,
                                      segments};

    // Compressed read-out (56 bits) and the modular-adder outputs.
    ledger_.add(CostModule::item_memory, position_bit_toggles(im_pos, entry.positions));
    std::copy(entry.positions.begin(), entry.positions.end(), im_pos.begin());
    std::uint64_t add_toggles = 0;
    std::uint64_t onehot_toggles = 0;
    for (std::uint32_t s = 0; s < segments; ++s) {
      const std::uint32_t next = (electrode.positions[s] + im_pos[s]) % seg_len;
      add_toggles += std::popcount(bind_pos[s] ^ next);
      if (next != bind_pos[s]) onehot_toggles += 2;
      bind_pos[s] = next;
    }
    ledger_.add(CostModule::binding, add_toggles);
    // Decoded one-hot rank feeding the OR tree.
    ledger_.add(CostModule::spatial_bundle, onehot_toggles);
    atomic_to_hv(bind_pos, cfg_.hv, bind_hv_[c]);
  }

  // OR tree; the final OR lands in the spatial output register.
  std::uint64_t tree_toggles = 0;
  const std::vector<BinaryHv>* prev = &bind_hv_;
  BinaryHv merged(dim);
  for (auto& level : or_tree_) {
    for (std::size_t j = 0; j < level.size(); ++j) {
      merged = (*prev)[2 * j];
      if (2 * j + 1 < prev->size()) merged |= (*prev)[2 * j + 1];
      tree_toggles += count_toggles(level[j], merged);
      level[j] = merged;
    }
    prev = &level;
  }
  merged = (*prev)[0];
  if (prev->size() > 1) merged |= (*prev)[1];
  tree_toggles += count_toggles(spatial_out_, merged);
  spatial_out_ = merged;
  ledger_.add(CostModule::spatial_bundle, tree_toggles);
}

void CostSimulator::step_dense(std::span<const std::uint8_t> codes) {
  for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
    const BinaryHv& entry = dim_->lookup(c, codes[c]);
    ledger_.add(CostModule::item_memory, count_toggles(im_hv_[c], entry));
    im_hv_[c] = entry;
    const BinaryHv bound = xor_bind(entry, dim_->electrode(c));
    ledger_.add(CostModule::binding, count_toggles(bind_hv_[c], bound));
    bind_hv_[c] = bound;
  }
  step_count_tree(cfg_.num_channels / 2 + 1);
}

// Adder/majority tree: per-level per-bit partial sums, then a thresholded
// spatial output register.
void CostSimulator::step_count_tree(std::uint32_t spatial_threshold) {
  const std::uint32_t dim = cfg_.hv.dimension;
  std::uint64_t tree_toggles = 0;

  for (std::size_t level = 0; level < count_tree_.size(); ++level) {
    std::vector<std::uint8_t>& regs = count_tree_[level];
    const std::size_t nodes = regs.size() / dim;
    for (std::size_t j = 0; j < nodes; ++j) {
      std::uint8_t* out = scratch_.data();
      if (level == 0) {
        const BinaryHv& a = bind_hv_[2 * j];
        const bool paired = 2 * j + 1 < bind_hv_.size();
        const BinaryHv* b = paired ? &bind_hv_[2 * j + 1] : nullptr;
        for (std::uint32_t i = 0; i < dim; ++i) {
          out[i] = static_cast<std::uint8_t>((a.bit(i) ? 1 : 0) +
                                             (paired && b->bit(i) ? 1 : 0));
        }
      } else {
        const std::vector<std::uint8_t>& prev = count_tree_[level - 1];
        const std::size_t prev_nodes = prev.size() / dim;
        const std::uint8_t* a = prev.data() + 2 * j * dim;
        if (2 * j + 1 < prev_nodes) {
          const std::uint8_t* b = prev.data() + (2 * j + 1) * dim;
          for (std::uint32_t i = 0; i < dim; ++i) {
            out[i] = static_cast<std::uint8_t>(a[i] + b[i]);
          }
        } else {
          std::memcpy(out, a, dim);
        }
      }
      std::uint8_t* reg = regs.data() + j * dim;
      tree_toggles += buffer_toggles(reg, out, dim);
      std::memcpy(reg, out, dim);
    }
  }
  const std::uint8_t* root = count_tree_.back().data();

  BinaryHv thresholded(dim);
  for (std::uint32_t i = 0; i < dim; ++i) {
    if (root[i] >= spatial_threshold) thresholded.set_bit(i);
  }
  tree_toggles += count_toggles(spatial_out_, thresholded);
  spatial_out_ = thresholded;
  ledger_.add(CostModule::spatial_bundle, tree_toggles);
}

void CostSimulator::finish_cycle() {
  // Saturating counters: only positions receiving a set bit can change, and
  // a saturated counter stays put.
  std::uint64_t acc_toggles = 0;
  const auto counts = acc_.counts();
  const auto words = spatial_out_.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word != 0) {
      const auto bit = static_cast<std::uint32_t>(std::countr_zero(word));
      word &= word - 1;
      const std::uint8_t old = counts[w * 64 + bit];
      const std::uint8_t next = old == 255 ? 255 : old + 1;
      acc_toggles += std::popcount(static_cast<unsigned>(old ^ next));
    }
  }
  acc_.add(spatial_out_);
  ledger_.add(CostModule::temporal_bundle, acc_toggles);

  ++cycle_in_frame_;
  ++ledger_.cycles;
  if (cycle_in_frame_ < cfg_.frame_length) return;

  // Frame boundary: thin, classify, reset.
  const BinaryHv next_frame = thin(acc_, cfg_.temporal_threshold);
  std::uint64_t frame_toggles = count_toggles(frame_hv_, next_frame);
  frame_hv_ = next_frame;
  frame_out_ = frame_hv_;
  if (am_) {
    const FramePrediction p = classify(frame_hv_, *am_, ledger_.frames);
    std::uint64_t am_toggles = 0;
    am_toggles += std::popcount(sim_nonseizure_ ^ p.similarity_nonseizure);
    am_toggles += std::popcount(sim_seizure_ ^ p.similarity_seizure);
    const bool seizure = p.predicted == FrameLabel::seizure;
    am_toggles += seizure != predicted_seizure_ ? 1 : 0;
    sim_nonseizure_ = p.similarity_nonseizure;
    sim_seizure_ = p.similarity_seizure;
    predicted_seizure_ = seizure;
    trace_.push_back(p);
    ledger_.add(CostModule::associative_memory, am_toggles);
  }
  for (std::uint8_t c : acc_.counts()) {
    frame_toggles += std::popcount(static_cast<unsigned>(c));
  }
  acc_.reset();
  ledger_.add(CostModule::temporal_bundle, frame_toggles);
  ++ledger_.frames;
  cycle_in_frame_ = 0;
}

namespace {

template <typename Memory>
CostLedger run_random(const PipelineConfig& cfg, const Memory& memory,
                      std::uint64_t cycles, std::uint64_t seed) {
  CostSimulator sim(cfg, memory);
  SplitMix64 rng(seed);
  std::vector<std::uint8_t> codes(cfg.num_channels);
  for (std::uint64_t t = 0; t < cycles; ++t) {
    for (auto& code : codes) code = static_cast<std::uint8_t>(rng.next_below(kLbpCodes));
    sim.step(codes);
  }
  return sim.ledger();
}

template <typename Memory>
SimulationResult run_recording(const PipelineConfig& cfg, const Memory& memory,
                               const Recording& rec, const AssociativeMemory* am,
                               std::uint64_t max_cycles) {
  CostSimulator sim(cfg, memory);
  if (am != nullptr) sim.set_associative_memory(*am);
  require(rec.num_channels() == cfg.num_channels,
          "cost simulator: recording channel count does not match config");
  const auto codes = lbp_codes(rec);
  require(!codes.empty() && codes.front().size() >= cfg.frame_length,
          "cost simulator: recording shorter than one frame");
  std::uint64_t cycles = codes.front().size();
  if (max_cycles != 0 && max_cycles < cycles) cycles = max_cycles;
  cycles -= cycles % cfg.frame_length;
  std::vector<std::uint8_t> cycle_codes(cfg.num_channels);
  for (std::uint64_t t = 0; t < cycles; ++t) {
    for (std::uint32_t c = 0; c < cfg.num_channels; ++c) {
      cycle_codes[c] = codes[c][t];
    }
    sim.step(cycle_codes);
  }
  return {sim.ledger(), sim.trace()};
}

}  // namespace

CostLedger simulate_random_codes(const PipelineConfig& cfg, const CompressedItemMemory& cim,
                                 std::uint64_t cycles, std::uint64_t seed) {
  return run_random(cfg, cim, cycles, seed);
}

CostLedger simulate_random_codes(const PipelineConfig& cfg, const DenseItemMemory& dim,
                                 std::uint64_t cycles, std::uint64_t seed) {
  return run_random(cfg, dim, cycles, seed);
}

SimulationResult simulate_recording(const PipelineConfig& cfg,
                                    const CompressedItemMemory& cim, const Recording& rec,
                                    const AssociativeMemory* am, std::uint64_t max_cycles) {
  return run_recording(cfg, cim, rec, am, max_cycles);
}

SimulationResult simulate_recording(const PipelineConfig& cfg, const DenseItemMemory& dim,
                                    const Recording& rec, const AssociativeMemory* am,
                                    std::uint64_t max_cycles) {
  return run_recording(cfg, dim, rec, am, max_cycles);
}

}  // namespace shdc
