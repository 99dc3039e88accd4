#pragma once

// Multichannel sample container with seizure annotations, backed by a small
// little-endian binary format ("SHRC") plus a CSV adapter for external data.
// Samples are 16-bit signed and stored channel-major.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace shdc {

// Annotation labels; only one class of event exists today.
inline constexpr std::uint32_t kSeizureLabel = 1;

struct Annotation {
  std::uint64_t onset_sample = 0;
  std::uint64_t offset_sample = 0;  // exclusive
  std::uint32_t label = kSeizureLabel;

  bool operator==(const Annotation&) const = default;
};

class Recording {
 public:
  Recording() = default;
  Recording(std::uint32_t num_channels, std::uint32_t sampling_rate, std::uint64_t num_samples);

  std::uint32_t num_channels() const { return num_channels_; }
  std::uint32_t sampling_rate() const { return sampling_rate_; }
  std::uint64_t num_samples() const { return num_samples_; }
  double duration_seconds() const {
    return static_cast<double>(num_samples_) / sampling_rate_;
  }

  std::int16_t sample(std::uint32_t channel, std::uint64_t t) const {
    return samples_[channel * num_samples_ + t];
  }
  void set_sample(std::uint32_t channel, std::uint64_t t, std::int16_t value) {
    samples_[channel * num_samples_ + t] = value;
  }
  std::span<const std::int16_t> channel(std::uint32_t c) const;

  std::vector<Annotation>& annotations() { return annotations_; }
  const std::vector<Annotation>& annotations() const { return annotations_; }
  std::vector<Annotation> seizures() const;  // annotations with the seizure label

  // Structural checks: geometry positive, annotations in bounds, sorted by
  // onset, and non-overlapping within each label. Throws data_error.
  void validate() const;

  void save(const std::filesystem::path& path) const;
  static Recording load(const std::filesystem::path& path);

  // CSV adapter. Rows are time points (channels as columns, optional header
  // row); annotations and the sampling rate live in a JSON sidecar. A missing
  // sidecar path yields an annotation-free recording at `default_rate`.
  void save_csv(const std::filesystem::path& csv_path,
                const std::filesystem::path& sidecar_path) const;
  static Recording load_csv(const std::filesystem::path& csv_path,
                            const std::filesystem::path& sidecar_path,
                            std::uint32_t default_rate = 512);

  bool operator==(const Recording&) const = default;

 private:
  std::uint32_t num_channels_ = 0;
  std::uint32_t sampling_rate_ = 0;
  std::uint64_t num_samples_ = 0;
  std::vector<std::int16_t> samples_;  // channel-major, length C * N
  std::vector<Annotation> annotations_;
};

}  // namespace shdc
