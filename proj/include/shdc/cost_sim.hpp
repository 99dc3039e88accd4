#pragma once

// Cycle-level switching-activity simulator. Drives the same encoding math as
// Pipeline but mirrors the register banks a pipelined implementation of each
// variant would carry, counting exact bit toggles (popcount of XOR between a
// register's consecutive values) into a per-module CostLedger.
//
// Register banks per variant (electrode registers are static and never
// toggle, so they are not tracked):
//
//   item_memory        IM read-out: C x 1024-bit entries (baseline, dense) or
//                      C x 56-bit position tuples (optimized).
//   binding            baseline: one-hot-to-position encoder outputs (C x 8 x
//                      7 bits) plus the 7 barrel-shifter pipeline stages
//                      (C x 1024 bits each); optimized: modular-adder outputs
//                      (C x 56 bits); dense: XOR outputs (C x 1024 bits).
//   spatial_bundle     the bundling tree's per-level partial results (counts
//                      for the adder/majority trees, bit-vectors for the OR
//                      tree; the optimized tree's decoded one-hot input rank
//                      counts here too) plus the spatial output HV.
//   temporal_bundle    the 1024 saturating 8-bit counters (including their
//                      end-of-frame reset) and the thinned frame HV.
//   associative_memory the two similarity scores and the prediction bit,
//                      updated once per frame when a memory is attached.
//
// The simulator's spatial output, frame HVs and predictions are bit-identical
// to Pipeline's; tests cross-check this every cycle.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shdc/cost_model.hpp"
#include "shdc/dense.hpp"
#include "shdc/hv.hpp"
#include "shdc/item_memory.hpp"
#include "shdc/pipeline.hpp"
#include "shdc/recording.hpp"

namespace shdc {

class CostSimulator {
 public:
  // Same variant/memory pairing rules as Pipeline.
  CostSimulator(const PipelineConfig& cfg, const CompressedItemMemory& cim);
  CostSimulator(const PipelineConfig& cfg, const DenseItemMemory& dim);

  // Attach class HVs so the similarity stage runs at each frame boundary.
  void set_associative_memory(const AssociativeMemory& am);

  // Advance one cycle (one code per channel).
  void step(std::span<const std::uint8_t> codes);

  const CostLedger& ledger() const { return ledger_; }
  const PipelineConfig& config() const { return cfg_; }

  // Register contents for cross-checking against Pipeline.
  const BinaryHv& spatial_output() const { return spatial_out_; }
  const std::optional<BinaryHv>& last_frame_hv() const { return frame_out_; }
  const std::vector<FramePrediction>& trace() const { return trace_; }

 private:
  void init_state();
  void step_sparse_baseline(std::span<const std::uint8_t> codes);
  void step_sparse_optimized(std::span<const std::uint8_t> codes);
  void step_dense(std::span<const std::uint8_t> codes);
  void step_count_tree(std::uint32_t spatial_threshold);
  void finish_cycle();

  PipelineConfig cfg_;
  std::optional<CompressedItemMemory> cim_;
  std::optional<DenseItemMemory> dim_;
  std::optional<AssociativeMemory> am_;
  CostLedger ledger_;

  // --- register mirrors ---
  // Sparse variants: IM entry / adder outputs as positions (C x S).
  std::vector<std::uint32_t> im_pos_;
  std::vector<std::uint32_t> bind_pos_;
  // Baseline: barrel pipeline stages 0..P-2 as positions (stage P-1 is the
  // bind output). Dense: im_hv_ holds the read-out entries, bind_hv_ the XOR
  // outputs. Optimized/baseline: bind_hv_ holds the decoded bound vectors.
  std::vector<std::uint32_t> barrel_pos_;
  std::vector<BinaryHv> im_hv_;
  std::vector<BinaryHv> bind_hv_;
  // Bundling tree levels; count trees use bytes, the OR tree uses HVs.
  std::vector<std::vector<std::uint8_t>> count_tree_;
  std::vector<std::vector<BinaryHv>> or_tree_;
  BinaryHv spatial_out_;
  Accumulator acc_;
  BinaryHv frame_hv_;
  std::optional<BinaryHv> frame_out_;
  std::uint32_t sim_nonseizure_ = 0;
  std::uint32_t sim_seizure_ = 0;
  bool predicted_seizure_ = false;
  std::uint32_t cycle_in_frame_ = 0;
  std::vector<FramePrediction> trace_;
  std::vector<std::uint8_t> scratch_;
};

// Uniform-random codes for `cycles` cycles; the workload for the switching
// probability and ordering checks.
CostLedger simulate_random_codes(const PipelineConfig& cfg, const CompressedItemMemory& cim,
                                 std::uint64_t cycles, std::uint64_t seed);
CostLedger simulate_random_codes(const PipelineConfig& cfg, const DenseItemMemory& dim,
                                 std::uint64_t cycles, std::uint64_t seed);

// Recording-driven run over whole frames (at most max_cycles when nonzero,
// rounded down to a frame multiple). With an AM attached the resulting trace
// matches Pipeline::run_inference on the same prefix.
struct SimulationResult {
  CostLedger ledger;
  std::vector<FramePrediction> trace;
};
SimulationResult simulate_recording(const PipelineConfig& cfg,
                                    const CompressedItemMemory& cim, const Recording& rec,
                                    const AssociativeMemory* am = nullptr,
                                    std::uint64_t max_cycles = 0);
SimulationResult simulate_recording(const PipelineConfig& cfg, const DenseItemMemory& dim,
                                    const Recording& rec,
                                    const AssociativeMemory* am = nullptr,
                                    std::uint64_t max_cycles = 0);

}  // namespace shdc
