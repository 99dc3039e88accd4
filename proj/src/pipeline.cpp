#include "shdc/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "shdc/errors.hpp"
#include "shdc/hv_ops.hpp"
#include "shdc/lbp.hpp"

namespace shdc {

namespace {

constexpr std::string_view kVariantNames[] = {"sparse_baseline", "sparse_optimized", "dense"};

std::string_view label_name(FrameLabel label) {
  return label == FrameLabel::seizure ? "seizure" : "nonseizure";
}

std::string hv_to_hex(const BinaryHv& hv) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(hv.word_count() * 16);
  for (std::uint64_t w : hv.words()) {
    for (int nibble = 15; nibble >= 0; --nibble) {
      out.push_back(digits[(w >> (4 * nibble)) & 0xf]);
    }
  }
  return out;
}

BinaryHv hv_from_hex(const std::string& hex, std::uint32_t dimension) {
  BinaryHv hv(dimension);
  auto words = hv.words();
  if (hex.size() != words.size() * 16) {
    throw data_error("associative memory: class vector has wrong length");
  }
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 16; ++i) {
      const char ch = hex[w * 16 + i];
      std::uint64_t nibble;
      if (ch >= '0' && ch <= '9') {
        nibble = static_cast<std::uint64_t>(ch - '0');
      } else if (ch >= 'a' && ch <= 'f') {
        nibble = static_cast<std::uint64_t>(ch - 'a' + 10);
      } else {
        throw data_error("associative memory: class vector is not hex");
      }
      value = (value << 4) | nibble;
    }
    words[w] = value;
  }
  const std::uint32_t tail = dimension % 64;
  if (tail != 0 && (words[words.size() - 1] >> tail) != 0) {
    throw data_error("associative memory: bits set past the declared dimension");
  }
  return hv;
}

// One-shot training core: per class, count how many frame HVs set each bit,
// then thin with the smallest threshold whose surviving density is at or
// below the target.
BinaryHv thin_counts_to_target(const std::vector<std::uint32_t>& counts, double target,
                               std::uint32_t dimension) {
  const auto target_bits =
      static_cast<std::uint64_t>(target * static_cast<double>(dimension));
  std::uint32_t max_count = 0;
  for (std::uint32_t c : counts) max_count = std::max(max_count, c);
  // bits_at_least[t] = number of positions with count >= t.
  std::vector<std::uint64_t> bits_at_least(max_count + 2, 0);
  for (std::uint32_t c : counts) {
    if (c > 0) bits_at_least[c] += 1;
  }
  for (std::uint32_t t = max_count; t >= 1; --t) bits_at_least[t] += bits_at_least[t + 1];
  std::uint32_t threshold = max_count + 1;  // empty vector as a last resort
  for (std::uint32_t t = 1; t <= max_count + 1; ++t) {
    if (bits_at_least[t] <= target_bits) {
      threshold = t;
      break;
    }
  }
  BinaryHv out(dimension);
  for (std::uint32_t i = 0; i < dimension; ++i) {
    if (counts[i] >= threshold) out.set_bit(i);
  }
  return out;
}

AssociativeMemory train_from_frame_hvs_impl(std::span<const BinaryHv> hvs,
                                            std::span<const FrameLabel> labels,
                                            const PipelineConfig& cfg) {
  if (hvs.size() != labels.size()) {
    throw std::invalid_argument("train: one label per frame required");
  }
  const std::uint32_t dim = cfg.hv.dimension;
  std::vector<std::uint32_t> counts_nonseizure(dim, 0);
  std::vector<std::uint32_t> counts_seizure(dim, 0);
  std::size_t frames_per_class[2] = {0, 0};
  for (std::size_t i = 0; i < hvs.size(); ++i) {
    if (hvs[i].dimension() != dim) {
      throw std::invalid_argument("train: frame dimension mismatch");
    }
    auto& counts =
        labels[i] == FrameLabel::seizure ? counts_seizure : counts_nonseizure;
    frames_per_class[static_cast<int>(labels[i])]++;
    const auto words = hvs[i].words();
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      std::uint64_t w = words[wi];
      while (w != 0) {
        counts[wi * 64 + static_cast<std::uint32_t>(std::countr_zero(w))]++;
        w &= w - 1;
      }
    }
  }
  if (frames_per_class[0] == 0 || frames_per_class[1] == 0) {
    throw data_error("train: need at least one frame of each class");
  }
  AssociativeMemory am;
  am.variant = cfg.variant;
  am.nonseizure =
      thin_counts_to_target(counts_nonseizure, cfg.training_density_target, dim);
  am.seizure = thin_counts_to_target(counts_seizure, cfg.training_density_target, dim);
  return am;
}

struct FrameGeometry {
  std::uint32_t frame_length;
  // Sample range [start, end) touched by a frame's code windows.
  std::uint64_t start(std::uint64_t f) const { return f * frame_length; }
  std::uint64_t end(std::uint64_t f) const {
    return (f + 1) * frame_length + (kLbpWindow - 1);
  }
  bool inside(std::uint64_t f, const Annotation& a) const {
    return start(f) >= a.onset_sample && end(f) <= a.offset_sample;
  }
  bool outside(std::uint64_t f, const Annotation& a) const {
    return end(f) <= a.onset_sample || start(f) >= a.offset_sample;
  }
};

DetectionReport build_report(const Recording& rec, const AssociativeMemory& am,
                             std::span<const Accumulator> frames, const PipelineConfig& cfg,
                             const InferenceOptions& options) {
  DetectionReport report;
  report.variant = cfg.variant;
  report.sampling_rate = rec.sampling_rate();
  report.frame_length = cfg.frame_length;
  report.num_frames = frames.size();

  const FrameGeometry geom{cfg.frame_length};
  double density_sum = 0.0;
  report.trace.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const BinaryHv hv = thin(frames[f], cfg.temporal_threshold);
    density_sum += hv.density();
    report.trace.push_back(classify(hv, am, f));
  }
  report.mean_density = frames.empty() ? 0.0 : density_sum / static_cast<double>(frames.size());

  const std::vector<Annotation> seizures = rec.seizures();
  std::size_t detected_count = 0;
  for (const Annotation& a : seizures) {
    SeizureOutcome outcome;
    outcome.annotation = a;
    const double horizon_s = options.detection_horizon_seconds.value_or(
        static_cast<double>(a.offset_sample - a.onset_sample) / rec.sampling_rate());
    const auto horizon_samples =
        static_cast<std::uint64_t>(std::llround(horizon_s * rec.sampling_rate()));
    for (std::uint64_t f = 0; f < report.trace.size(); ++f) {
      if (geom.end(f) <= a.onset_sample) continue;  // frame entirely pre-onset
      const std::uint64_t start = geom.start(f);
      const std::uint64_t delay_samples = start > a.onset_sample ? start - a.onset_sample : 0;
      if (delay_samples > horizon_samples) break;  // past the detection window
      if (report.trace[f].predicted == FrameLabel::seizure) {
        outcome.detected = true;
        outcome.detection_frame = f;
        outcome.delay_seconds =
            static_cast<double>(delay_samples) / rec.sampling_rate();
        outcome.delay_frames =
            static_cast<double>(delay_samples) / cfg.frame_length;
        ++detected_count;
        break;
      }
    }
    report.seizures.push_back(outcome);
  }
  if (!seizures.empty()) {
    report.accuracy = static_cast<double>(detected_count) / static_cast<double>(seizures.size());
  }

  for (std::uint64_t f = 0; f < report.trace.size(); ++f) {
    if (report.trace[f].predicted != FrameLabel::seizure) continue;
    bool clear = true;
    for (const Annotation& a : seizures) {
      if (!geom.outside(f, a)) {
        clear = false;
        break;
      }
    }
    if (clear) report.false_positive_frames++;
  }
  return report;
}

nlohmann::json optional_to_json(const std::optional<double>& value) {
  if (value.has_value()) return *value;
  return nullptr;
}

}  // namespace

std::string_view variant_name(Variant v) { return kVariantNames[static_cast<int>(v)]; }

Variant parse_variant(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (name == kVariantNames[i]) return static_cast<Variant>(i);
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected sparse_baseline, sparse_optimized, or dense)");
}

void PipelineConfig::validate() const {
  hv.validate();
  if (num_channels == 0) throw std::invalid_argument("pipeline: num_channels must be >= 1");
  if (frame_length == 0) throw std::invalid_argument("pipeline: frame_length must be >= 1");
  const std::uint32_t max_threshold = std::min<std::uint32_t>(frame_length, 256);
  if (temporal_threshold < 1 || temporal_threshold > max_threshold) {
    throw std::invalid_argument("pipeline: temporal_threshold must be in [1, " +
                                std::to_string(max_threshold) + "]");
  }
  if (!(training_density_target > 0.0 && training_density_target <= 1.0)) {
    throw std::invalid_argument("pipeline: training_density_target must be in (0, 1]");
  }
  if (variant == Variant::sparse_baseline) {
    if (!spatial_threshold.has_value()) {
      throw std::invalid_argument("pipeline: sparse_baseline requires spatial_threshold");
    }
    if (*spatial_threshold < 1 || *spatial_threshold > num_channels) {
      throw std::invalid_argument("pipeline: spatial_threshold must be in [1, num_channels]");
    }
  } else if (spatial_threshold.has_value()) {
    throw std::invalid_argument(
        "pipeline: spatial_threshold is only meaningful for sparse_baseline");
  }
}

FramePrediction classify(const BinaryHv& frame_hv, const AssociativeMemory& am,
                         std::uint64_t frame_index) {
  if (am.nonseizure.dimension() != am.seizure.dimension() ||
      am.nonseizure.dimension() != frame_hv.dimension()) {
    throw std::invalid_argument("classify: dimension mismatch");
  }
  FramePrediction out;
  out.frame_index = frame_index;
  if (am.variant == Variant::dense) {
    const std::uint32_t dim = frame_hv.dimension();
    out.similarity_nonseizure = dim - hamming_distance(frame_hv, am.nonseizure);
    out.similarity_seizure = dim - hamming_distance(frame_hv, am.seizure);
  } else {
    out.similarity_nonseizure = overlap_similarity(frame_hv, am.nonseizure);
    out.similarity_seizure = overlap_similarity(frame_hv, am.seizure);
  }
  out.tie = out.similarity_seizure == out.similarity_nonseizure;
  out.predicted = out.similarity_seizure > out.similarity_nonseizure ? FrameLabel::seizure
                                                                     : FrameLabel::nonseizure;
  return out;
}

void AssociativeMemory::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["variant"] = variant_name(variant);
  j["dimension"] = nonseizure.dimension();
  j["nonseizure"] = hv_to_hex(nonseizure);
  j["seizure"] = hv_to_hex(seizure);
  std::ofstream os(path);
  if (!os) throw data_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw data_error("write failed for " + path.string());
}

AssociativeMemory AssociativeMemory::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path.string() + ": " + e.what());
  }
  try {
    AssociativeMemory am;
    am.variant = parse_variant(j.at("variant").get<std::string>());
    const auto dimension = j.at("dimension").get<std::uint32_t>();
    if (dimension == 0) throw data_error("associative memory: zero dimension");
    am.nonseizure = hv_from_hex(j.at("nonseizure").get<std::string>(), dimension);
    am.seizure = hv_from_hex(j.at("seizure").get<std::string>(), dimension);
    return am;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw data_error(path.string() + ": " + e.what());
  }
}

std::vector<std::vector<std::uint8_t>> lbp_codes(const Recording& rec) {
  std::vector<std::vector<std::uint8_t>> codes(rec.num_channels());
  const std::uint64_t warm =
      rec.num_samples() >= kLbpWindow ? rec.num_samples() - (kLbpWindow - 1) : 0;
  for (std::uint32_t c = 0; c < rec.num_channels(); ++c) {
    codes[c].reserve(warm);
    LbpEncoder enc;
    for (std::int16_t sample : rec.channel(c)) {
      if (auto code = enc.push(sample)) codes[c].push_back(*code);
    }
  }
  return codes;
}

FrameLabeling label_training_frames(const Recording& rec, std::size_t seizure_index,
                                    const PipelineConfig& cfg) {
  const std::vector<Annotation> seizures = rec.seizures();
  if (seizure_index >= seizures.size()) {
    throw std::invalid_argument("seizure index " + std::to_string(seizure_index) +
                                " out of range; recording has " +
                                std::to_string(seizures.size()) + " annotated seizures");
  }
  const std::uint64_t warm_needed = cfg.frame_length + (kLbpWindow - 1);
  if (rec.num_samples() < warm_needed) {
    throw std::invalid_argument("recording shorter than one frame");
  }
  const std::uint64_t num_frames = (rec.num_samples() - (kLbpWindow - 1)) / cfg.frame_length;
  const FrameGeometry geom{cfg.frame_length};
  const Annotation& train = seizures[seizure_index];

  FrameLabeling labeling;
  for (std::uint64_t f = 0; f < num_frames; ++f) {
    if (geom.inside(f, train)) {
      labeling.seizure_frames.push_back(f);
      continue;
    }
    bool clear = true;
    for (const Annotation& a : seizures) {
      if (!geom.outside(f, a)) {
        clear = false;
        break;
      }
    }
    if (clear) labeling.nonseizure_frames.push_back(f);
  }
  return labeling;
}

Pipeline::Pipeline(PipelineConfig cfg, CompressedItemMemory cim) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.variant == Variant::dense) {
    throw std::invalid_argument("pipeline: dense variant needs a dense item memory");
  }
  if (cim.num_channels() != cfg_.num_channels) {
    throw std::invalid_argument("pipeline: item memory channel count mismatch");
  }
  if (cim.config() != cfg_.hv) {
    throw std::invalid_argument("pipeline: item memory geometry mismatch");
  }
  if (cfg_.variant == Variant::sparse_baseline) im_ = expand(cim);
  cim_ = std::move(cim);
}

Pipeline::Pipeline(PipelineConfig cfg, DenseItemMemory dim) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (cfg_.variant != Variant::dense) {
    throw std::invalid_argument("pipeline: sparse variants need a sparse item memory");
  }
  if (dim.num_channels() != cfg_.num_channels) {
    throw std::invalid_argument("pipeline: item memory channel count mismatch");
  }
  if (dim.dimension() != cfg_.hv.dimension) {
    throw std::invalid_argument("pipeline: item memory geometry mismatch");
  }
  dim_ = std::move(dim);
}

BinaryHv Pipeline::spatial_encode(std::span<const std::uint8_t> codes) const {
  if (codes.size() != cfg_.num_channels) {
    throw std::invalid_argument("spatial_encode: expected one code per channel");
  }
  switch (cfg_.variant) {
    case Variant::sparse_baseline: {
      std::vector<BinaryHv> bound;
      bound.reserve(cfg_.num_channels);
      for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
        const AtomicHv shift = one_hot_decode(im_->lookup(c, codes[c]), cfg_.hv);
        bound.push_back(bind_barrel(im_->electrode(c), shift.positions, cfg_.hv));
      }
      return bundle_threshold(bound, *cfg_.spatial_threshold);
    }
    case Variant::sparse_optimized: {
      BinaryHv out(cfg_.hv.dimension);
      for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
        const AtomicHv bound =
            bind_positions(cim_->electrode(c), cim_->lookup(c, codes[c]), cfg_.hv);
        for (std::uint32_t s = 0; s < cfg_.hv.segments; ++s) {
          out.set_bit(s * cfg_.hv.segment_length + bound.positions[s]);
        }
      }
      return out;
    }
    case Variant::dense: {
      std::vector<BinaryHv> bound;
      bound.reserve(cfg_.num_channels);
      for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) {
        bound.push_back(xor_bind(dim_->electrode(c), dim_->lookup(c, codes[c])));
      }
      return majority_bundle(bound);
    }
  }
  throw std::logic_error("spatial_encode: unreachable");
}

BinaryHv Pipeline::temporal_encode(std::span<const BinaryHv> frame) const {
  if (frame.size() != cfg_.frame_length) {
    throw std::invalid_argument("temporal_encode: expected exactly frame_length inputs");
  }
  Accumulator acc(cfg_.hv.dimension);
  for (const BinaryHv& hv : frame) acc.add(hv);
  return frame_hv(acc);
}

BinaryHv Pipeline::frame_hv(const Accumulator& acc) const {
  return thin(acc, cfg_.temporal_threshold);
}

std::vector<Accumulator> Pipeline::encode_frames(const Recording& rec) const {
  if (rec.num_channels() != cfg_.num_channels) {
    throw std::invalid_argument("pipeline: recording channel count mismatch");
  }
  if (rec.num_samples() < cfg_.frame_length + (kLbpWindow - 1)) {
    throw std::invalid_argument("recording shorter than one frame");
  }
  const auto codes = lbp_codes(rec);
  const std::uint64_t warm = codes.front().size();
  const std::uint64_t num_frames = warm / cfg_.frame_length;

  std::vector<Accumulator> frames;
  frames.reserve(num_frames);
  std::vector<std::uint8_t> column(cfg_.num_channels);
  for (std::uint64_t f = 0; f < num_frames; ++f) {
    Accumulator acc(cfg_.hv.dimension);
    for (std::uint64_t t = f * cfg_.frame_length; t < (f + 1) * cfg_.frame_length; ++t) {
      for (std::uint32_t c = 0; c < cfg_.num_channels; ++c) column[c] = codes[c][t];
      acc.add(spatial_encode(column));
    }
    frames.push_back(std::move(acc));
  }
  return frames;
}

AssociativeMemory Pipeline::train_one_shot(std::span<const LabeledFrame> frames) const {
  std::vector<BinaryHv> hvs;
  std::vector<FrameLabel> labels;
  hvs.reserve(frames.size());
  labels.reserve(frames.size());
  for (const LabeledFrame& frame : frames) {
    if (frame.cycles.size() != cfg_.frame_length) {
      throw std::invalid_argument("train: frame must hold exactly frame_length cycles");
    }
    Accumulator acc(cfg_.hv.dimension);
    for (const auto& cycle : frame.cycles) acc.add(spatial_encode(cycle));
    hvs.push_back(frame_hv(acc));
    labels.push_back(frame.label);
  }
  return train_from_frame_hvs_impl(hvs, labels, cfg_);
}

AssociativeMemory Pipeline::train_one_shot(const Recording& rec,
                                           std::size_t seizure_index) const {
  const FrameLabeling labeling = label_training_frames(rec, seizure_index, cfg_);
  if (labeling.seizure_frames.empty()) {
    throw data_error("train: the selected seizure contains no complete frame");
  }
  if (labeling.nonseizure_frames.empty()) {
    throw data_error("train: recording has no frame clear of all seizures");
  }
  const std::vector<Accumulator> frames = encode_frames(rec);
  std::vector<BinaryHv> hvs;
  std::vector<FrameLabel> labels;
  for (std::uint64_t f : labeling.seizure_frames) {
    hvs.push_back(frame_hv(frames[f]));
    labels.push_back(FrameLabel::seizure);
  }
  for (std::uint64_t f : labeling.nonseizure_frames) {
    hvs.push_back(frame_hv(frames[f]));
    labels.push_back(FrameLabel::nonseizure);
  }
  return train_from_frame_hvs_impl(hvs, labels, cfg_);
}

AssociativeMemory Pipeline::train_from_frame_hvs(std::span<const BinaryHv> hvs,
                                                 std::span<const FrameLabel> labels) const {
  return train_from_frame_hvs_impl(hvs, labels, cfg_);
}

DetectionReport Pipeline::run_inference(const Recording& rec, const AssociativeMemory& am,
                                        const InferenceOptions& options) const {
  const bool am_dense = am.variant == Variant::dense;
  const bool cfg_dense = cfg_.variant == Variant::dense;
  if (am_dense != cfg_dense) {
    throw std::invalid_argument("run_inference: associative memory variant mismatch");
  }
  if (am.nonseizure.dimension() != cfg_.hv.dimension) {
    throw std::invalid_argument("run_inference: associative memory dimension mismatch");
  }
  if (options.detection_horizon_seconds.has_value() &&
      *options.detection_horizon_seconds < 0) {
    throw std::invalid_argument("run_inference: detection horizon must be >= 0");
  }
  const std::vector<Accumulator> frames = encode_frames(rec);
  return build_report(rec, am, frames, cfg_, options);
}

BinaryHv spatial_encode(std::span<const std::uint8_t> codes, const ItemMemory& im,
                        const PipelineConfig& cfg) {
  if (cfg.variant != Variant::sparse_baseline) {
    throw std::invalid_argument("spatial_encode: binary item memory implies sparse_baseline");
  }
  return Pipeline(cfg, compress(im)).spatial_encode(codes);
}

BinaryHv spatial_encode(std::span<const std::uint8_t> codes, const CompressedItemMemory& cim,
                        const PipelineConfig& cfg) {
  return Pipeline(cfg, cim).spatial_encode(codes);
}

BinaryHv temporal_encode(std::span<const BinaryHv> frame, const PipelineConfig& cfg) {
  cfg.validate();
  if (frame.size() != cfg.frame_length) {
    throw std::invalid_argument("temporal_encode: expected exactly frame_length inputs");
  }
  Accumulator acc(cfg.hv.dimension);
  for (const BinaryHv& hv : frame) {
    if (hv.dimension() != cfg.hv.dimension) {
      throw std::invalid_argument("temporal_encode: dimension mismatch");
    }
    acc.add(hv);
  }
  return thin(acc, cfg.temporal_threshold);
}

nlohmann::json DetectionReport::to_json() const {
  nlohmann::json j;
  j["variant"] = variant_name(variant);
  j["sampling_rate"] = sampling_rate;
  j["frame_length"] = frame_length;
  j["num_frames"] = num_frames;
  j["accuracy"] = optional_to_json(accuracy);
  j["false_positive_frames"] = false_positive_frames;
  j["mean_density"] = mean_density;
  nlohmann::json seizure_rows = nlohmann::json::array();
  for (const SeizureOutcome& s : seizures) {
    nlohmann::json row;
    row["onset_sample"] = s.annotation.onset_sample;
    row["offset_sample"] = s.annotation.offset_sample;
    row["detected"] = s.detected;
    if (s.detected) {
      row["detection_frame"] = s.detection_frame;
      row["delay_seconds"] = s.delay_seconds;
      row["delay_frames"] = s.delay_frames;
    }
    seizure_rows.push_back(std::move(row));
  }
  j["seizures"] = std::move(seizure_rows);
  nlohmann::json trace_rows = nlohmann::json::array();
  for (const FramePrediction& p : trace) {
    trace_rows.push_back({{"frame", p.frame_index},
                          {"similarity_nonseizure", p.similarity_nonseizure},
                          {"similarity_seizure", p.similarity_seizure},
                          {"predicted", label_name(p.predicted)},
                          {"tie", p.tie}});
  }
  j["trace"] = std::move(trace_rows);
  return j;
}

void DetectionReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open " + path.string() + " for writing");
  os << "frame_index,similarity_nonseizure,similarity_seizure,predicted,tie\n";
  for (const FramePrediction& p : trace) {
    os << p.frame_index << ',' << p.similarity_nonseizure << ',' << p.similarity_seizure << ','
       << label_name(p.predicted) << ',' << (p.tie ? 1 : 0) << '\n';
  }
  if (!os) throw data_error("write failed for " + path.string());
}

namespace {

struct RecordingAggregate {
  std::size_t evaluated = 0;
  std::size_t detected = 0;
  double delay_sum = 0.0;
  double density_weighted = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t false_positives = 0;
};

RecordingAggregate aggregate_report(const DetectionReport& report,
                                    std::size_t train_seizure_index) {
  RecordingAggregate agg;
  for (std::size_t s = 0; s < report.seizures.size(); ++s) {
    if (s == train_seizure_index) continue;  // never score the training seizure
    agg.evaluated++;
    if (report.seizures[s].detected) {
      agg.detected++;
      agg.delay_sum += report.seizures[s].delay_seconds;
    }
  }
  agg.density_weighted = report.mean_density * static_cast<double>(report.num_frames);
  agg.frames = report.num_frames;
  agg.false_positives = report.false_positive_frames;
  return agg;
}

}  // namespace

SweepTable sweep_max_density(std::span<const Recording> recordings,
                             const CompressedItemMemory& cim, const PipelineConfig& cfg,
                             std::span<const std::uint32_t> thresholds,
                             std::size_t train_seizure_index,
                             const InferenceOptions& options) {
  cfg.validate();
  if (cfg.variant == Variant::dense) {
    throw std::invalid_argument("sweep: density sweep applies to the sparse variants");
  }
  if (recordings.empty()) throw std::invalid_argument("sweep: no recordings");
  if (thresholds.empty()) throw std::invalid_argument("sweep: empty threshold list");

  // The expensive encoding pass does not depend on the temporal threshold, so
  // run it once per recording and share the count vectors across the sweep.
  const Pipeline base(cfg, cim);
  std::vector<std::vector<Accumulator>> frames_per_recording;
  std::vector<FrameLabeling> labelings;
  for (const Recording& rec : recordings) {
    labelings.push_back(label_training_frames(rec, train_seizure_index, cfg));
    if (labelings.back().seizure_frames.empty() ||
        labelings.back().nonseizure_frames.empty()) {
      throw data_error("sweep: a recording lacks training frames for one class");
    }
    frames_per_recording.push_back(base.encode_frames(rec));
  }

  struct ThresholdResult {
    SweepRow row;
    std::vector<SweepRecordingRow> recording_rows;
  };

  auto evaluate_threshold = [&](std::uint32_t threshold) {
    PipelineConfig point = cfg;
    point.temporal_threshold = threshold;
    point.validate();

    ThresholdResult result;
    result.row.temporal_threshold = threshold;
    RecordingAggregate total;
    for (std::size_t r = 0; r < recordings.size(); ++r) {
      const auto& frames = frames_per_recording[r];
      std::vector<BinaryHv> hvs;
      std::vector<FrameLabel> labels;
      for (std::uint64_t f : labelings[r].seizure_frames) {
        hvs.push_back(thin(frames[f], threshold));
        labels.push_back(FrameLabel::seizure);
      }
      for (std::uint64_t f : labelings[r].nonseizure_frames) {
        hvs.push_back(thin(frames[f], threshold));
        labels.push_back(FrameLabel::nonseizure);
      }
      const AssociativeMemory am = train_from_frame_hvs_impl(hvs, labels, point);
      const DetectionReport report =
          build_report(recordings[r], am, frames_per_recording[r], point, options);
      const RecordingAggregate agg = aggregate_report(report, train_seizure_index);

      SweepRecordingRow row;
      row.recording_index = r;
      row.temporal_threshold = threshold;
      if (agg.evaluated > 0) {
        row.accuracy = static_cast<double>(agg.detected) / static_cast<double>(agg.evaluated);
      }
      if (agg.detected > 0) {
        row.mean_delay_s = agg.delay_sum / static_cast<double>(agg.detected);
      }
      row.mean_density = report.mean_density;
      row.false_positive_frames = agg.false_positives;
      result.recording_rows.push_back(row);

      total.evaluated += agg.evaluated;
      total.detected += agg.detected;
      total.delay_sum += agg.delay_sum;
      total.density_weighted += agg.density_weighted;
      total.frames += agg.frames;
      total.false_positives += agg.false_positives;
    }
    if (total.evaluated > 0) {
      result.row.accuracy =
          static_cast<double>(total.detected) / static_cast<double>(total.evaluated);
    }
    if (total.detected > 0) {
      result.row.mean_delay_s = total.delay_sum / static_cast<double>(total.detected);
    }
    result.row.mean_density =
        total.frames > 0 ? total.density_weighted / static_cast<double>(total.frames) : 0.0;
    result.row.false_positive_frames = total.false_positives;
    return result;
  };

  std::vector<std::future<ThresholdResult>> futures;
  futures.reserve(thresholds.size());
  for (std::uint32_t threshold : thresholds) {
    futures.push_back(std::async(std::launch::async, evaluate_threshold, threshold));
  }

  SweepTable table;
  for (auto& future : futures) {
    ThresholdResult result = future.get();
    table.rows.push_back(result.row);
    for (const auto& row : result.recording_rows) table.recording_rows.push_back(row);
  }

  // Best row: highest accuracy, then lowest mean delay, then lowest threshold.
  std::size_t best = 0;
  auto better = [](const SweepRow& a, const SweepRow& b) {
    const double acc_a = a.accuracy.value_or(-1.0);
    const double acc_b = b.accuracy.value_or(-1.0);
    if (acc_a != acc_b) return acc_a > acc_b;
    const double delay_a = a.mean_delay_s.value_or(std::numeric_limits<double>::infinity());
    const double delay_b = b.mean_delay_s.value_or(std::numeric_limits<double>::infinity());
    if (delay_a != delay_b) return delay_a < delay_b;
    return a.temporal_threshold < b.temporal_threshold;
  };
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (better(table.rows[i], table.rows[best])) best = i;
  }
  table.best_index = best;
  table.rows[best].best = true;
  return table;
}

nlohmann::json SweepTable::to_json() const {
  nlohmann::json j;
  j["best_index"] = best_index;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const SweepRow& row : rows) {
    rows_json.push_back({{"temporal_threshold", row.temporal_threshold},
                         {"accuracy", optional_to_json(row.accuracy)},
                         {"mean_delay_s", optional_to_json(row.mean_delay_s)},
                         {"mean_density", row.mean_density},
                         {"false_positive_frames", row.false_positive_frames},
                         {"best", row.best}});
  }
  j["rows"] = std::move(rows_json);
  nlohmann::json rec_rows = nlohmann::json::array();
  for (const SweepRecordingRow& row : recording_rows) {
    rec_rows.push_back({{"recording", row.recording_index},
                        {"temporal_threshold", row.temporal_threshold},
                        {"accuracy", optional_to_json(row.accuracy)},
                        {"mean_delay_s", optional_to_json(row.mean_delay_s)},
                        {"mean_density", row.mean_density},
                        {"false_positive_frames", row.false_positive_frames}});
  }
  j["recording_rows"] = std::move(rec_rows);
  return j;
}

void SweepTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open " + path.string() + " for writing");
  auto cell = [](const std::optional<double>& v) {
    return v.has_value() ? std::to_string(*v) : std::string("na");
  };
  os << "scope,threshold,mean_delay_s,accuracy,mean_density,false_positive_frames,best\n";
  for (const SweepRow& row : rows) {
    os << "aggregate," << row.temporal_threshold << ',' << cell(row.mean_delay_s) << ','
       << cell(row.accuracy) << ',' << row.mean_density << ',' << row.false_positive_frames
       << ',' << (row.best ? 1 : 0) << '\n';
  }
  for (const SweepRecordingRow& row : recording_rows) {
    os << "recording_" << row.recording_index << ',' << row.temporal_threshold << ','
       << cell(row.mean_delay_s) << ',' << cell(row.accuracy) << ',' << row.mean_density << ','
       << row.false_positive_frames << ",0\n";
  }
  if (!os) throw data_error("write failed for " + path.string());
}

}  // namespace shdc
