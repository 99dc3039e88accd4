#pragma once

// Deterministic synthetic multichannel recordings: a colored-noise background
// with annotated seizure intervals during which the sample process switches
// to a phase-staggered triangle wave. The regime change shifts the LBP code
// distribution sharply, which is what the downstream encoder keys on. All
// arithmetic is integral so output is bit-identical across platforms.

#include <cstdint>

#include "shdc/recording.hpp"

namespace shdc {

struct SynthConfig {
  std::uint64_t seed = 1;
  std::uint32_t num_channels = 64;
  std::uint32_t sampling_rate = 512;
  double duration_seconds = 600.0;
  std::uint32_t num_seizures = 4;
  double seizure_seconds = 20.0;

  void validate() const;  // throws std::invalid_argument
};

Recording synth_recording(const SynthConfig& config);

}  // namespace shdc
