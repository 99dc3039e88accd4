#include "shdc/experiment_config.hpp"

#include <fstream>

#include "shdc/errors.hpp"

namespace shdc {

namespace {

// Pull a scalar out of `j`, enforcing the expected JSON type.
template <typename T>
T get_field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const nlohmann::json& v = j.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw data_error(std::string("config: '") + key + "' must be a number");
  } else {
    if (!v.is_number_unsigned()) {
      throw data_error(std::string("config: '") + key + "' must be a non-negative integer");
    }
  }
  return v.get<T>();
}

void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                const char* where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) {
      throw data_error(std::string("config: unknown key '") + key + "' in " + where);
    }
  }
}

std::filesystem::path get_path(const nlohmann::json& paths, const char* key) {
  if (!paths.contains(key)) return {};
  if (!paths.at(key).is_string()) {
    throw data_error(std::string("config: paths entry '") + key + "' must be a string");
  }
  return std::filesystem::path(paths.at(key).get<std::string>());
}

}  // namespace

PipelineConfig ExperimentConfig::pipeline() const { return pipeline_for(variant); }

PipelineConfig ExperimentConfig::pipeline_for(Variant v) const {
  PipelineConfig cfg;
  cfg.variant = v;
  cfg.num_channels = num_channels.value_or(64);
  cfg.frame_length = frame_length;
  if (v == Variant::sparse_baseline) {
    cfg.spatial_threshold = spatial_threshold.value_or(1);
  }
  cfg.temporal_threshold =
      temporal_threshold.value_or(v == Variant::dense ? 128u : 130u);
  cfg.training_density_target = training_density_target;
  cfg.hv = hv;
  cfg.validate();
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["variant"] = std::string(variant_name(variant));
  if (num_channels) j["num_channels"] = *num_channels;
  j["frame_length"] = frame_length;
  if (spatial_threshold) j["spatial_threshold"] = *spatial_threshold;
  if (temporal_threshold) j["temporal_threshold"] = *temporal_threshold;
  j["training_density_target"] = training_density_target;
  j["hv"] = {{"dimension", hv.dimension}, {"segments", hv.segments}};
  j["seed"] = seed;
  nlohmann::json paths = nlohmann::json::object();
  if (!item_memory_path.empty()) paths["item_memory"] = item_memory_path.string();
  if (!recording_path.empty()) paths["recording"] = recording_path.string();
  if (!recording_paths.empty()) {
    paths["recordings"] = nlohmann::json::array();
    for (const auto& p : recording_paths) paths["recordings"].push_back(p.string());
  }
  if (!am_path.empty()) paths["associative_memory"] = am_path.string();
  if (!report_path.empty()) paths["report"] = report_path.string();
  if (!gate_model_path.empty()) paths["gate_model"] = gate_model_path.string();
  j["paths"] = paths;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw data_error("config: expected a JSON object");
  check_keys(j,
             {"variant", "num_channels", "frame_length", "spatial_threshold",
              "temporal_threshold", "training_density_target", "hv", "seed", "paths"},
             "the top-level object");

  ExperimentConfig cfg;
  if (j.contains("variant")) {
    if (!j.at("variant").is_string()) throw data_error("config: 'variant' must be a string");
    try {
      cfg.variant = parse_variant(j.at("variant").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw data_error(e.what());
    }
  }
  if (j.contains("num_channels")) {
    cfg.num_channels = get_field<std::uint32_t>(j, "num_channels", 0);
  }
  cfg.frame_length = get_field<std::uint32_t>(j, "frame_length", cfg.frame_length);
  if (j.contains("spatial_threshold")) {
    cfg.spatial_threshold = get_field<std::uint32_t>(j, "spatial_threshold", 0);
  }
  if (j.contains("temporal_threshold")) {
    cfg.temporal_threshold = get_field<std::uint32_t>(j, "temporal_threshold", 0);
  }
  cfg.training_density_target =
      get_field<double>(j, "training_density_target", cfg.training_density_target);
  if (j.contains("hv")) {
    const nlohmann::json& hv = j.at("hv");
    if (!hv.is_object()) throw data_error("config: 'hv' must be an object");
    check_keys(hv, {"dimension", "segments"}, "'hv'");
    const auto dimension = get_field<std::uint32_t>(hv, "dimension", cfg.hv.dimension);
    const auto segments = get_field<std::uint32_t>(hv, "segments", cfg.hv.segments);
    try {
      cfg.hv = HvConfig::make(dimension, segments);
    } catch (const std::invalid_argument& e) {
      throw data_error(e.what());
    }
  }
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  if (j.contains("paths")) {
    const nlohmann::json& paths = j.at("paths");
    if (!paths.is_object()) throw data_error("config: 'paths' must be an object");
    check_keys(paths,
               {"item_memory", "recording", "recordings", "associative_memory", "report",
                "gate_model"},
               "'paths'");
    cfg.item_memory_path = get_path(paths, "item_memory");
    cfg.recording_path = get_path(paths, "recording");
    cfg.am_path = get_path(paths, "associative_memory");
    cfg.report_path = get_path(paths, "report");
    cfg.gate_model_path = get_path(paths, "gate_model");
    if (paths.contains("recordings")) {
      if (!paths.at("recordings").is_array()) {
        throw data_error("config: paths entry 'recordings' must be an array");
      }
      for (const nlohmann::json& p : paths.at("recordings")) {
        if (!p.is_string()) {
          throw data_error("config: paths entry 'recordings' must hold strings");
        }
        cfg.recording_paths.emplace_back(p.get<std::string>());
      }
    }
  }

  // Fail on inconsistent pipeline parameters at load time rather than deep
  // inside a command.
  try {
    cfg.pipeline();
  } catch (const std::invalid_argument& e) {
    throw data_error(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace shdc
