#pragma once

// Hardware-cost proxy. Two quantities are modeled, both unitless:
//
//   * Area, in gate equivalents (GE), from structural gate counts: every
//     datapath block is decomposed into two-input gates, full adders, muxes,
//     register bits and memory (LUT) bits, each weighted by a configurable
//     GateModel. No synthesis, placement or leakage modeling.
//   * Dynamic energy, as switching activity: bit toggles at the pipeline
//     registers of each module, counted exactly (popcount of XOR between
//     consecutive cycle values) by the simulator in cost_sim.hpp.
//
// Both are reported per module so the breakdowns of the three variants can
// be compared. Only orderings and ratios are meaningful; no physical units
// are ever attached.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "shdc/hv.hpp"
#include "shdc/pipeline.hpp"

#include "json.hpp"

namespace shdc {

// Gate-equivalent weights. Defaults approximate a generic standard-cell
// library; override any subset via JSON ({"full_adder": 3.0, ...}) to
// calibrate against a specific one.
struct GateModel {
  double full_adder = 2.5;
  double or2 = 1.0;
  double and2 = 1.0;
  double xor2 = 1.5;
  double mux2 = 1.5;
  double register_bit = 4.0;
  double lut_bit = 0.25;

  void validate() const;  // throws std::invalid_argument unless all positive

  nlohmann::json to_json() const;
  static GateModel from_json(const nlohmann::json& j);       // throws data_error
  static GateModel load(const std::filesystem::path& path);  // throws data_error

  bool operator==(const GateModel&) const = default;
};

// The five module boundaries every variant shares.
enum class CostModule : std::size_t {
  item_memory = 0,
  binding = 1,
  spatial_bundle = 2,
  temporal_bundle = 3,
  associative_memory = 4,
};
inline constexpr std::size_t kNumCostModules = 5;
inline constexpr std::array<CostModule, kNumCostModules> kCostModules = {
    CostModule::item_memory, CostModule::binding, CostModule::spatial_bundle,
    CostModule::temporal_bundle, CostModule::associative_memory};

std::string_view cost_module_name(CostModule m);

struct ModuleAreas {
  std::array<double, kNumCostModules> ge{};

  double& operator[](CostModule m) { return ge[static_cast<std::size_t>(m)]; }
  double operator[](CostModule m) const { return ge[static_cast<std::size_t>(m)]; }
  double total() const;
  double share_percent(CostModule m) const;  // 100 * module / total
};

// Structural area estimate for one variant. A bundling tree over n inputs is
// n-1 two-input nodes (full-adder-equivalent nodes for counting/majority
// trees, OR2 for the thinning-free tree); the remaining formulas are spelled
// out in the implementation and in the README.
ModuleAreas estimate_area(const PipelineConfig& cfg, const GateModel& gates);

// Toggle totals accumulated by a simulation run.
struct CostLedger {
  std::array<std::uint64_t, kNumCostModules> toggles{};
  std::uint64_t cycles = 0;
  std::uint64_t frames = 0;
  std::uint64_t im_output_bits = 0;  // width of the IM output register bank

  void add(CostModule m, std::uint64_t n) { toggles[static_cast<std::size_t>(m)] += n; }
  std::uint64_t toggle_count(CostModule m) const {
    return toggles[static_cast<std::size_t>(m)];
  }
  std::uint64_t total_toggles() const;
  // Both throw std::logic_error on an empty ledger (cycles == 0).
  double toggles_per_cycle() const;
  double toggle_share_percent(CostModule m) const;
  // Mean per-bit switching probability at the IM output registers.
  double im_output_toggle_rate() const;
};

// popcount(prev XOR next); dimension mismatch throws std::invalid_argument.
std::uint64_t count_toggles(const BinaryHv& prev, const BinaryHv& next);

// One variant's complete cost picture.
struct CostReport {
  Variant variant = Variant::sparse_optimized;
  ModuleAreas area;
  CostLedger ledger;
};

// Synthesis-measured efficiency factors for the reference 16nm
// implementation of this architecture, printed next to this proxy's measured
// ratios for qualitative comparison; the proxy asserts only directions.
inline constexpr double kReferenceEnergyGainVsBaseline = 1.72;
inline constexpr double kReferenceAreaGainVsBaseline = 2.20;
inline constexpr double kReferenceEnergyGainVsDense = 7.50;
inline constexpr double kReferenceAreaGainVsDense = 3.24;

struct CostRatios {
  // ratio of the other variant's cost to the optimized variant's (> 1 means
  // the optimized design is cheaper)
  double energy = 0.0;
  double area = 0.0;
  double reference_energy = 0.0;
  double reference_area = 0.0;
};

struct CostComparison {
  std::vector<CostReport> reports;
  // Filled when the respective variant pair is present.
  std::optional<CostRatios> baseline_over_optimized;
  std::optional<CostRatios> dense_over_optimized;

  nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;  // per-module rows
};

// Validates the ledgers (throws std::logic_error when one has zero cycles)
// and derives the ratio table.
CostComparison report_breakdown(std::span<const CostReport> reports);

}  // namespace shdc
