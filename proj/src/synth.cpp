#include "shdc/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "shdc/prng.hpp"

namespace shdc {

namespace {

// Seizure waveform: a sawtooth of period 64 samples, rising by +400 for 63
// steps and dropping off a cliff once per period. The added noise (quarter of
// the background innovation, <= +-256 per sample) can never invert a pairwise
// comparison, so the rising run makes LBP code 63 recur in 58 of every 64
// cycles per channel - a dominant code that survives temporal thinning, which
// is exactly the structure the classifier keys on. Phase is taken from
// absolute sample time so frames at the same alignment see the same waveform
// in every seizure.
constexpr std::int32_t kWavePeriod = 64;
constexpr std::int32_t kWaveStep = 400;
constexpr std::int32_t kWaveOffset = kWaveStep * (kWavePeriod - 1) / 2;  // 12600

std::int32_t sawtooth(std::int64_t t, std::uint32_t channel) {
  const std::int32_t p =
      static_cast<std::int32_t>((t + 7 * static_cast<std::int64_t>(channel)) % kWavePeriod);
  return kWaveStep * p - kWaveOffset;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_channels == 0) throw std::invalid_argument("synth: num_channels must be >= 1");
  if (sampling_rate == 0) throw std::invalid_argument("synth: sampling_rate must be >= 1");
  const auto num_samples = static_cast<std::uint64_t>(duration_seconds * sampling_rate);
  // One frame of LBP codes needs 256 codes plus the 6-sample warm-up.
  if (num_samples < 262) {
    throw std::invalid_argument("synth: duration must cover at least one 256-sample frame");
  }
  if (num_seizures > 0) {
    // Seizure k is centered in slot k+1 of num_seizures+1 equal slots; the
    // slot must hold the seizure, the +-1 s onset jitter, and enough
    // background on both sides to train on.
    const std::uint64_t slot = num_samples / (num_seizures + 1);
    const auto seizure_len = static_cast<std::uint64_t>(seizure_seconds * sampling_rate);
    if (seizure_seconds <= 0 || seizure_len + 4ull * sampling_rate > slot) {
      throw std::invalid_argument(
          "synth: seizures do not fit; need >= 4 s of background around each");
    }
  }
}

Recording synth_recording(const SynthConfig& config) {
  config.validate();
  const std::uint32_t rate = config.sampling_rate;
  const std::uint64_t num_samples =
      static_cast<std::uint64_t>(config.duration_seconds * rate);
  Recording rec(config.num_channels, rate, num_samples);

  SplitMix64 rng(config.seed);

  // Seizure intervals: evenly spaced with +-1 s of seeded jitter on the onset.
  const std::uint64_t seizure_len = static_cast<std::uint64_t>(config.seizure_seconds * rate);
  for (std::uint32_t k = 0; k < config.num_seizures; ++k) {
    const std::uint64_t slot = num_samples / (config.num_seizures + 1);
    const std::int64_t jitter = rng.next_in(-static_cast<std::int64_t>(rate),
                                            static_cast<std::int64_t>(rate));
    const std::uint64_t onset =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(slot * (k + 1)) + jitter);
    rec.annotations().push_back({onset, onset + seizure_len, kSeizureLabel});
  }

  // One innovation draw per channel per sample regardless of regime keeps the
  // stream aligned, so moving an onset never reshuffles unrelated samples.
  const auto& seizures = rec.annotations();
  for (std::uint32_t c = 0; c < config.num_channels; ++c) {
    std::int32_t background = 0;
    std::size_t next_seizure = 0;
    for (std::uint64_t t = 0; t < num_samples; ++t) {
      const std::int32_t u = static_cast<std::int32_t>(rng.next_in(-1024, 1024));
      while (next_seizure < seizures.size() && t >= seizures[next_seizure].offset_sample) {
        ++next_seizure;
      }
      const bool in_seizure =
          next_seizure < seizures.size() && t >= seizures[next_seizure].onset_sample;
      std::int32_t value;
      if (in_seizure) {
        value = sawtooth(static_cast<std::int64_t>(t), c) + u / 4;
      } else {
        background += u - background / 8;
        value = background;
      }
      rec.set_sample(c, t, static_cast<std::int16_t>(value));
    }
  }

  rec.validate();
  return rec;
}

}  // namespace shdc
