#pragma once

// The full classifier: per-cycle spatial encoding (bind each channel's item
// HV into its electrode HV, bundle across channels), per-frame temporal
// encoding (saturating accumulation over 256 cycles, then thinning), a
// two-class associative memory, one-shot training, inference with detection
// metrics, and the threshold sweep harness.
//
// Three variants share this interface:
//   sparse_baseline  - binary IM lookups, one-hot decode + barrel-shift
//                      binding, counting spatial bundler (threshold
//                      configurable, 1 by default).
//   sparse_optimized - compressed IM (positions only), modular-add binding,
//                      OR-tree spatial bundler. Bit-identical to the baseline
//                      at spatial threshold 1.
//   dense            - 50%-density IM, XOR binding, majority bundling,
//                      Hamming-similarity AM. Used for cost comparisons.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shdc/dense.hpp"
#include "shdc/hv.hpp"
#include "shdc/item_memory.hpp"
#include "shdc/recording.hpp"

#include "json.hpp"

namespace shdc {

enum class Variant { sparse_baseline, sparse_optimized, dense };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);  // throws std::invalid_argument

struct PipelineConfig {
  Variant variant = Variant::sparse_optimized;
  std::uint32_t num_channels = 64;
  std::uint32_t frame_length = 256;
  // Counting-bundler threshold; required for sparse_baseline, forbidden
  // otherwise. Threshold 1 makes the baseline equal the optimized OR path.
  std::optional<std::uint32_t> spatial_threshold;
  std::uint32_t temporal_threshold = 130;
  double training_density_target = 0.5;
  HvConfig hv;

  void validate() const;  // throws std::invalid_argument

  bool operator==(const PipelineConfig&) const = default;
};

enum class FrameLabel : std::uint8_t { nonseizure = 0, seizure = 1 };

struct FramePrediction {
  std::uint64_t frame_index = 0;
  std::uint32_t similarity_nonseizure = 0;
  std::uint32_t similarity_seizure = 0;
  FrameLabel predicted = FrameLabel::nonseizure;
  bool tie = false;

  bool operator==(const FramePrediction&) const = default;
};

struct AssociativeMemory {
  Variant variant = Variant::sparse_optimized;
  BinaryHv nonseizure;
  BinaryHv seizure;

  void save(const std::filesystem::path& path) const;
  static AssociativeMemory load(const std::filesystem::path& path);

  bool operator==(const AssociativeMemory&) const = default;
};

// Similarity per class (overlap for sparse AMs, dimension minus Hamming
// distance for dense ones), argmax, ties resolved to non-seizure with the
// tie flag set.
FramePrediction classify(const BinaryHv& frame_hv, const AssociativeMemory& am,
                         std::uint64_t frame_index = 0);

struct SeizureOutcome {
  Annotation annotation;
  bool detected = false;
  std::uint64_t detection_frame = 0;  // meaningful only when detected
  double delay_seconds = 0.0;
  double delay_frames = 0.0;
};

struct DetectionReport {
  Variant variant = Variant::sparse_optimized;
  std::uint32_t sampling_rate = 0;
  std::uint32_t frame_length = 0;
  std::uint64_t num_frames = 0;
  std::vector<FramePrediction> trace;  // exactly one entry per frame
  std::vector<SeizureOutcome> seizures;
  std::optional<double> accuracy;   // detected/total; empty when no seizures
  std::uint64_t false_positive_frames = 0;  // seizure frames clear of any annotation
  double mean_density = 0.0;        // mean frame-HV density

  double frame_seconds() const {
    return static_cast<double>(frame_length) / sampling_rate;
  }

  nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;  // per-frame trace
};

struct InferenceOptions {
  // A seizure counts as detected when a seizure-labeled frame starts within
  // this many seconds of onset. Unset = the annotated seizure's own duration.
  std::optional<double> detection_horizon_seconds;
};

// A labeled frame of raw codes for the one-shot trainer: cycle-major, each
// cycle holding one 6-bit code per channel.
struct LabeledFrame {
  std::vector<std::vector<std::uint8_t>> cycles;
  FrameLabel label = FrameLabel::nonseizure;
};

// Frame indices eligible for training: frames fully inside the chosen
// seizure and frames fully outside every annotation.
struct FrameLabeling {
  std::vector<std::uint64_t> seizure_frames;
  std::vector<std::uint64_t> nonseizure_frames;
};
FrameLabeling label_training_frames(const Recording& rec, std::size_t seizure_index,
                                    const PipelineConfig& cfg);

// Per-channel LBP code streams for a whole recording; codes[c][t] is the code
// whose newest sample is rec.sample(c, t + 6).
std::vector<std::vector<std::uint8_t>> lbp_codes(const Recording& rec);

class Pipeline {
 public:
  // The config's variant selects which memory a constructor accepts; a
  // mismatch throws std::invalid_argument.
  Pipeline(PipelineConfig cfg, CompressedItemMemory cim);
  Pipeline(PipelineConfig cfg, DenseItemMemory dim);

  const PipelineConfig& config() const { return cfg_; }

  // One spatial encoding step: codes is one 6-bit code per channel.
  BinaryHv spatial_encode(std::span<const std::uint8_t> codes) const;

  // One full frame: accumulate frame_length spatial HVs, thin at the
  // temporal threshold.
  BinaryHv temporal_encode(std::span<const BinaryHv> frame) const;

  // Threshold-independent part of a full run: per-frame saturating count
  // vectors (frames are contiguous from the start of the recording, one per
  // frame_length warm cycles).
  std::vector<Accumulator> encode_frames(const Recording& rec) const;

  AssociativeMemory train_one_shot(std::span<const LabeledFrame> frames) const;
  AssociativeMemory train_one_shot(const Recording& rec, std::size_t seizure_index) const;

  DetectionReport run_inference(const Recording& rec, const AssociativeMemory& am,
                                const InferenceOptions& options = {}) const;

 private:
  BinaryHv frame_hv(const Accumulator& acc) const;
  AssociativeMemory train_from_frame_hvs(std::span<const BinaryHv> hvs,
                                         std::span<const FrameLabel> labels) const;
  DetectionReport report_from_frames(const Recording& rec, const AssociativeMemory& am,
                                     std::span<const Accumulator> frames,
                                     const InferenceOptions& options) const;

  PipelineConfig cfg_;
  // Sparse variants: compressed memory always present, expanded binary form
  // materialized for the baseline path only.
  std::optional<CompressedItemMemory> cim_;
  std::optional<ItemMemory> im_;
  std::optional<DenseItemMemory> dim_;
};

// Free-function forms of the two encoder stages (construct the matching
// variant's pipeline internally; fine for tests, use Pipeline in loops).
BinaryHv spatial_encode(std::span<const std::uint8_t> codes, const ItemMemory& im,
                        const PipelineConfig& cfg);
BinaryHv spatial_encode(std::span<const std::uint8_t> codes, const CompressedItemMemory& cim,
                        const PipelineConfig& cfg);
BinaryHv temporal_encode(std::span<const BinaryHv> frame, const PipelineConfig& cfg);

struct SweepRow {
  std::uint32_t temporal_threshold = 0;
  std::optional<double> accuracy;      // over evaluated (non-training) seizures
  std::optional<double> mean_delay_s;  // over detected evaluated seizures
  double mean_density = 0.0;
  std::uint64_t false_positive_frames = 0;
  bool best = false;
};

struct SweepRecordingRow {
  std::size_t recording_index = 0;
  std::uint32_t temporal_threshold = 0;
  std::optional<double> accuracy;
  std::optional<double> mean_delay_s;
  double mean_density = 0.0;
  std::uint64_t false_positive_frames = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;                     // one per threshold
  std::vector<SweepRecordingRow> recording_rows;  // per (threshold, recording)
  std::size_t best_index = 0;

  nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;
};

// For each threshold: retrain on seizure `train_seizure_index` of each
// recording, run inference, aggregate delay/accuracy over the remaining
// seizures plus the measured post-thinning density. Thresholds fan out
// across worker threads. The best row maximizes accuracy, then minimizes
// mean delay, then threshold.
SweepTable sweep_max_density(std::span<const Recording> recordings,
                             const CompressedItemMemory& cim, const PipelineConfig& cfg,
                             std::span<const std::uint32_t> thresholds,
                             std::size_t train_seizure_index = 0,
                             const InferenceOptions& options = {});

}  // namespace shdc
