#pragma once

// One JSON document describing an experiment: pipeline parameters, the seed,
// and the file paths the CLI commands read and write. Field-by-field schema:
//
//   {
//     "variant": "sparse_optimized",        // or sparse_baseline | dense
//     "num_channels": 64,                   // default: from the input file, else 64
//     "frame_length": 256,
//     "spatial_threshold": 1,               // only for sparse_baseline
//     "temporal_threshold": 130,            // default 130 sparse, 128 dense
//     "training_density_target": 0.5,
//     "hv": {"dimension": 1024, "segments": 8},
//     "seed": 1,
//     "paths": {
//       "item_memory": "im.shim",
//       "recording": "patient.shrc",
//       "recordings": ["a.shrc", "b.shrc"],
//       "associative_memory": "am.json",
//       "report": "out/report",
//       "gate_model": "gates.json"
//     }
//   }
//
// Every field is optional and falls back to the defaults above; unknown keys
// are rejected. CLI flags override any of these values.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "shdc/pipeline.hpp"

#include "json.hpp"

namespace shdc {

struct ExperimentConfig {
  Variant variant = Variant::sparse_optimized;
  // Unset means: adopt the channel count of the artifact being processed
  // (item memories and recordings record their own), falling back to 64.
  std::optional<std::uint32_t> num_channels;
  std::uint32_t frame_length = 256;
  std::optional<std::uint32_t> spatial_threshold;
  // Unset means the variant default: 130 for the sparse pair, 128 for dense.
  std::optional<std::uint32_t> temporal_threshold;
  double training_density_target = 0.5;
  HvConfig hv;
  std::uint64_t seed = 1;

  std::filesystem::path item_memory_path;
  std::filesystem::path recording_path;
  std::vector<std::filesystem::path> recording_paths;
  std::filesystem::path am_path;
  std::filesystem::path report_path;
  std::filesystem::path gate_model_path;

  // Resolved pipeline configuration for this config's variant, or for
  // another variant sharing the same geometry (the cost command runs all
  // three on identical input). Baseline gets spatial threshold 1 unless set.
  PipelineConfig pipeline() const;  // throws std::invalid_argument
  PipelineConfig pipeline_for(Variant v) const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);       // data_error
  static ExperimentConfig load(const std::filesystem::path& path);  // data_error
};

}  // namespace shdc
