#include "shdc/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "shdc/cost_model.hpp"
#include "shdc/cost_sim.hpp"
#include "shdc/dense.hpp"
#include "shdc/errors.hpp"
#include "shdc/experiment_config.hpp"
#include "shdc/item_memory.hpp"
#include "shdc/pipeline.hpp"
#include "shdc/recording.hpp"
#include "shdc/synth.hpp"

#include "CLI11.hpp"

namespace shdc {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

// A flag beats the config file, which beats the built-in default.
template <typename T>
T pick(const std::optional<T>& flag, T config_value) {
  return flag.value_or(config_value);
}

std::filesystem::path pick_path(const std::optional<std::string>& flag,
                                const std::filesystem::path& config_value,
                                const char* what) {
  if (flag) return std::filesystem::path(*flag);
  if (!config_value.empty()) return config_value;
  throw std::invalid_argument(std::string("missing required path: ") + what);
}

Recording load_recording(const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".json");
    return Recording::load_csv(path, sidecar);
  }
  return Recording::load(path);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw data_error("failed writing: " + path.string());
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return std::filesystem::path(prefix.string() + suffix);
}

// Per-subcommand option bundles; std::optional keeps "was the flag given"
// separate from the config-file fallback.
struct CliState {
  std::optional<std::string> config_path;
  ExperimentConfig config;

  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> channels;
  std::optional<std::uint32_t> dimension;
  std::optional<std::uint32_t> segments;
  std::optional<std::string> out;
  std::optional<std::string> im_path;
  std::optional<std::string> recording;
  std::vector<std::string> recordings;
  std::optional<std::string> am_path;
  std::optional<std::string> report;
  std::optional<std::string> gate_model;
  std::uint32_t sampling_rate = 512;
  double duration_seconds = 600.0;
  std::uint32_t num_seizures = 4;
  double seizure_seconds = 20.0;
  std::size_t seizure_index = 0;
  std::vector<std::uint32_t> thresholds;
  std::vector<std::string> variants;
  std::uint64_t max_cycles = 20000;

  HvConfig hv_config() const {
    if (!dimension && !segments) return config.hv;
    return HvConfig::make(dimension.value_or(config.hv.dimension),
                          segments.value_or(config.hv.segments));
  }
  std::uint64_t effective_seed() const { return pick(seed, config.seed); }

  // Channel precedence: --channels flag, then the config file, then the
  // artifact being processed (a recording knows its own channel count), then
  // the built-in default of 64.
  ExperimentConfig merged(std::optional<std::uint32_t> artifact_channels = {}) const {
    ExperimentConfig merged = config;
    merged.seed = effective_seed();
    if (channels) {
      merged.num_channels = channels;
    } else if (!merged.num_channels) {
      merged.num_channels = artifact_channels;
    }
    merged.hv = hv_config();
    return merged;
  }
};

CompressedItemMemory load_item_memory(const CliState& st) {
  return CompressedItemMemory::load(
      pick_path(st.im_path, st.config.item_memory_path, "--im"));
}

// Build the pipeline for `cfg`, generating the dense table from the seed
// (the dense variant has no file format; it exists for cost comparison).
Pipeline make_pipeline(const PipelineConfig& cfg, const CliState& st) {
  if (cfg.variant == Variant::dense) {
    return Pipeline(cfg, DenseItemMemory::generate(st.merged().seed, cfg.num_channels,
                                                   cfg.hv.dimension));
  }
  return Pipeline(cfg, load_item_memory(st));
}

int cmd_gen_im(const CliState& st) {
  const ExperimentConfig cfg = st.merged();
  const std::uint32_t channels = cfg.num_channels.value_or(64);
  const auto path = pick_path(st.out, st.config.item_memory_path, "--out");
  const CompressedItemMemory im = CompressedItemMemory::generate(cfg.seed, channels, cfg.hv);
  im.save(path);
  std::cout << "wrote " << path.string() << " (channels=" << channels
            << ", dimension=" << cfg.hv.dimension << ", seed=" << cfg.seed << ")\n";
  return 0;
}

int cmd_synth(const CliState& st) {
  SynthConfig synth;
  synth.seed = st.effective_seed();
  synth.num_channels = st.merged().num_channels.value_or(64);
  synth.sampling_rate = st.sampling_rate;
  synth.duration_seconds = st.duration_seconds;
  synth.num_seizures = st.num_seizures;
  synth.seizure_seconds = st.seizure_seconds;
  const Recording rec = synth_recording(synth);
  const auto path = pick_path(st.out, st.config.recording_path, "--out");
  rec.save(path);
  std::cout << "wrote " << path.string() << ": " << rec.num_channels() << " channels, "
            << rec.num_samples() << " samples at " << rec.sampling_rate() << " Hz, "
            << rec.seizures().size() << " annotated seizures\n";
  return 0;
}

int cmd_train(const CliState& st) {
  const Recording rec =
      load_recording(pick_path(st.recording, st.config.recording_path, "--recording"));
  const PipelineConfig cfg = st.merged(rec.num_channels()).pipeline();
  const Pipeline pipeline = make_pipeline(cfg, st);
  const AssociativeMemory am = pipeline.train_one_shot(rec, st.seizure_index);
  const auto path = pick_path(st.am_path, st.config.am_path, "--out-am");
  am.save(path);
  std::cout << "wrote " << path.string() << " (trained on seizure " << st.seizure_index
            << "; class densities " << am.nonseizure.density() << " / "
            << am.seizure.density() << ")\n";
  return 0;
}

int cmd_infer(const CliState& st) {
  const Recording rec =
      load_recording(pick_path(st.recording, st.config.recording_path, "--recording"));
  const PipelineConfig cfg = st.merged(rec.num_channels()).pipeline();
  const AssociativeMemory am =
      AssociativeMemory::load(pick_path(st.am_path, st.config.am_path, "--am"));
  const Pipeline pipeline = make_pipeline(cfg, st);
  const DetectionReport report = pipeline.run_inference(rec, am);

  const auto prefix = pick_path(st.report, st.config.report_path, "--report");
  write_json_file(with_suffix(prefix, ".json"), report.to_json());
  report.write_csv(with_suffix(prefix, ".csv"));

  std::cout << "frames: " << report.num_frames;
  if (report.accuracy) {
    std::size_t detected = 0;
    for (const SeizureOutcome& s : report.seizures) detected += s.detected ? 1 : 0;
    std::cout << ", accuracy: " << *report.accuracy << " (" << detected << "/"
              << report.seizures.size() << " seizures)";
    for (const SeizureOutcome& s : report.seizures) {
      if (s.detected) std::cout << ", delay " << s.delay_seconds << " s";
    }
  } else {
    std::cout << ", no annotated seizures";
  }
  std::cout << ", false positive frames: " << report.false_positive_frames
            << ", mean density: " << report.mean_density << "\n";
  std::cout << "wrote " << with_suffix(prefix, ".json").string() << " and "
            << with_suffix(prefix, ".csv").string() << "\n";
  return 0;
}

int cmd_sweep(const CliState& st) {
  std::vector<std::filesystem::path> paths;
  for (const std::string& p : st.recordings) paths.emplace_back(p);
  if (paths.empty()) paths = st.config.recording_paths;
  if (paths.empty() && st.recording) paths.emplace_back(*st.recording);
  if (paths.empty() && !st.config.recording_path.empty()) {
    paths.push_back(st.config.recording_path);
  }
  if (paths.empty()) throw std::invalid_argument("missing required path: --recordings");

  std::vector<Recording> recordings;
  recordings.reserve(paths.size());
  for (const auto& p : paths) recordings.push_back(load_recording(p));
  const PipelineConfig cfg = st.merged(recordings.front().num_channels()).pipeline();

  std::vector<std::uint32_t> thresholds = st.thresholds;
  if (thresholds.empty()) {
    thresholds = {64, 96, 112, 120, 128, 130, 136, 144, 160, 192, 224, 256};
  }

  const CompressedItemMemory im = load_item_memory(st);
  const SweepTable table =
      sweep_max_density(recordings, im, cfg, thresholds, st.seizure_index);

  const auto prefix = pick_path(st.report, st.config.report_path, "--report");
  write_json_file(with_suffix(prefix, ".json"), table.to_json());
  table.write_csv(with_suffix(prefix, ".csv"));

  const SweepRow& best = table.rows[table.best_index];
  std::cout << "swept " << thresholds.size() << " thresholds over " << recordings.size()
            << " recording(s); best threshold " << best.temporal_threshold;
  if (best.accuracy) std::cout << " (accuracy " << *best.accuracy;
  if (best.mean_delay_s) std::cout << ", mean delay " << *best.mean_delay_s << " s";
  if (best.accuracy) std::cout << ")";
  std::cout << ", mean density " << best.mean_density << "\n";
  std::cout << "wrote " << with_suffix(prefix, ".json").string() << " and "
            << with_suffix(prefix, ".csv").string() << "\n";
  return 0;
}

int cmd_cost(const CliState& st) {
  const Recording rec =
      load_recording(pick_path(st.recording, st.config.recording_path, "--recording"));
  const ExperimentConfig merged = st.merged(rec.num_channels());

  GateModel gates;
  if (st.gate_model) {
    gates = GateModel::load(std::filesystem::path(*st.gate_model));
  } else if (!st.config.gate_model_path.empty()) {
    gates = GateModel::load(st.config.gate_model_path);
  }

  std::vector<Variant> variants;
  for (const std::string& name : st.variants) variants.push_back(parse_variant(name));

  // Sparse variants share the stored item memory; the dense table is derived
  // from the seed. With an annotated seizure present, each variant also gets
  // a one-shot-trained AM so the similarity stage toggles.
  std::optional<CompressedItemMemory> cim;
  std::optional<DenseItemMemory> dim;
  std::vector<CostReport> reports;
  for (Variant v : variants) {
    const PipelineConfig cfg = merged.pipeline_for(v);
    CostReport report;
    report.variant = v;
    report.area = estimate_area(cfg, gates);
    const bool trained = !rec.seizures().empty();
    if (v == Variant::dense) {
      if (!dim) {
        dim = DenseItemMemory::generate(merged.seed, cfg.num_channels, cfg.hv.dimension);
      }
      std::optional<AssociativeMemory> am;
      if (trained) am = Pipeline(cfg, *dim).train_one_shot(rec, st.seizure_index);
      report.ledger =
          simulate_recording(cfg, *dim, rec, am ? &*am : nullptr, st.max_cycles).ledger;
    } else {
      if (!cim) cim = load_item_memory(st);
      std::optional<AssociativeMemory> am;
      if (trained) am = Pipeline(cfg, *cim).train_one_shot(rec, st.seizure_index);
      report.ledger =
          simulate_recording(cfg, *cim, rec, am ? &*am : nullptr, st.max_cycles).ledger;
    }
    reports.push_back(std::move(report));
  }

  const CostComparison cmp = report_breakdown(reports);
  const auto prefix = pick_path(st.report, st.config.report_path, "--report");
  write_json_file(with_suffix(prefix, ".json"), cmp.to_json());
  cmp.write_csv(with_suffix(prefix, ".csv"));

  std::printf("%-18s %14s %16s %12s\n", "variant", "area [GE]", "toggles/cycle",
              "IM switch");
  for (const CostReport& r : cmp.reports) {
    std::printf("%-18s %14.1f %16.2f %11.2f%%\n",
                std::string(variant_name(r.variant)).c_str(), r.area.total(),
                r.ledger.toggles_per_cycle(), 100.0 * r.ledger.im_output_toggle_rate());
  }
  auto print_ratios = [](const char* label, const CostRatios& r) {
    std::printf("optimized vs %s: energy %.2fx (reference %.2fx), area %.2fx (reference %.2fx)\n",
                label, r.energy, r.reference_energy, r.area, r.reference_area);
  };
  if (cmp.baseline_over_optimized) print_ratios("sparse baseline", *cmp.baseline_over_optimized);
  if (cmp.dense_over_optimized) print_ratios("dense", *cmp.dense_over_optimized);
  std::cout << "wrote " << with_suffix(prefix, ".json").string() << " and "
            << with_suffix(prefix, ".csv").string() << "\n";
  return 0;
}

void add_config_option(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "JSON experiment config; flags override");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Sparse hyperdimensional computing workbench for iEEG seizure detection"};
  app.require_subcommand(1);
  CliState st;

  CLI::App* gen = app.add_subcommand("gen-im", "Generate a seeded item memory file");
  add_config_option(gen, st);
  gen->add_option("--seed", st.seed, "PRNG seed");
  gen->add_option("--channels", st.channels, "Number of input channels");
  gen->add_option("--dimension", st.dimension, "HV dimension in bits");
  gen->add_option("--segments", st.segments, "Segments per HV");
  gen->add_option("--out", st.out, "Output item memory path");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic annotated recording");
  add_config_option(synth, st);
  synth->add_option("--seed", st.seed, "PRNG seed");
  synth->add_option("--channels", st.channels, "Number of channels");
  synth->add_option("--rate", st.sampling_rate, "Sampling rate in Hz");
  synth->add_option("--duration", st.duration_seconds, "Recording length in seconds");
  synth->add_option("--seizures", st.num_seizures, "Number of seizure intervals");
  synth->add_option("--seizure-seconds", st.seizure_seconds, "Length of each seizure");
  synth->add_option("--out", st.out, "Output recording path");

  CLI::App* train = app.add_subcommand("train", "One-shot-train an associative memory");
  add_config_option(train, st);
  train->add_option("--im", st.im_path, "Item memory file");
  train->add_option("--recording", st.recording, "Recording file (.shrc or .csv)");
  train->add_option("--seizure-index", st.seizure_index, "Training seizure (0-based)");
  train->add_option("--out-am", st.am_path, "Output associative memory path");

  CLI::App* infer = app.add_subcommand("infer", "Run inference and write a report");
  add_config_option(infer, st);
  infer->add_option("--im", st.im_path, "Item memory file");
  infer->add_option("--recording", st.recording, "Recording file (.shrc or .csv)");
  infer->add_option("--am", st.am_path, "Associative memory file");
  infer->add_option("--report", st.report, "Report path prefix (.json/.csv appended)");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the temporal threshold");
  add_config_option(sweep, st);
  sweep->add_option("--im", st.im_path, "Item memory file");
  sweep->add_option("--recordings", st.recordings, "Recording files")->delimiter(',');
  sweep->add_option("--recording", st.recording, "Single recording shorthand");
  sweep->add_option("--thresholds", st.thresholds, "Temporal thresholds to try")
      ->delimiter(',');
  sweep->add_option("--train-seizure-index", st.seizure_index,
                    "Seizure used for training in each recording");
  sweep->add_option("--report", st.report, "Report path prefix (.json/.csv appended)");

  CLI::App* cost = app.add_subcommand("cost", "Compare switching activity and area");
  add_config_option(cost, st);
  cost->add_option("--im", st.im_path, "Item memory file");
  cost->add_option("--recording", st.recording, "Recording driving the simulation");
  cost->add_option("--variants", st.variants, "Variants to compare")->delimiter(',');
  cost->add_option("--max-cycles", st.max_cycles, "Cycle budget per variant");
  cost->add_option("--gate-model", st.gate_model, "Gate-equivalent weights JSON");
  cost->add_option("--train-seizure-index", st.seizure_index,
                   "Seizure used to train the AMs");
  cost->add_option("--report", st.report, "Report path prefix (.json/.csv appended)");

  try {
    // CLI11's vector overload consumes from the back, so pass argv reversed.
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);  // --help and friends
    }
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (st.config_path) st.config = ExperimentConfig::load(*st.config_path);
    if (st.variants.empty()) {
      st.variants = {"sparse_baseline", "sparse_optimized", "dense"};
    }
    if (gen->parsed()) return cmd_gen_im(st);
    if (synth->parsed()) return cmd_synth(st);
    if (train->parsed()) return cmd_train(st);
    if (infer->parsed()) return cmd_infer(st);
    if (sweep->parsed()) return cmd_sweep(st);
    return cmd_cost(st);
  } catch (const data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace shdc
