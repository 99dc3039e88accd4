#include "shdc/cost_model.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include "shdc/errors.hpp"
#include "shdc/item_memory.hpp"

namespace shdc {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

// n-input balanced bundling tree: n-1 two-input nodes.
double tree_nodes(std::uint32_t inputs) {
  return inputs == 0 ? 0.0 : static_cast<double>(inputs - 1);
}

}  // namespace

void GateModel::validate() const {
  for (double w : {full_adder, or2, and2, xor2, mux2, register_bit, lut_bit}) {
    require(w > 0.0, "gate model: all weights must be strictly positive");
  }
}

nlohmann::json GateModel::to_json() const {
  return {
      {"full_adder", full_adder}, {"or2", or2},
      {"and2", and2},             {"xor2", xor2},
      {"mux2", mux2},             {"register_bit", register_bit},
      {"lut_bit", lut_bit},
  };
}

GateModel GateModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw data_error("gate model: expected a JSON object");
  GateModel gm;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) {
      throw data_error("gate model: weight '" + key + "' is not a number");
    }
    const double w = value.get<double>();
    if (key == "full_adder") {
      gm.full_adder = w;
    } else if (key == "or2") {
      gm.or2 = w;
    } else if (key == "and2") {
      gm.and2 = w;
    } else if (key == "xor2") {
      gm.xor2 = w;
    } else if (key == "mux2") {
      gm.mux2 = w;
    } else if (key == "register_bit") {
      gm.register_bit = w;
    } else if (key == "lut_bit") {
      gm.lut_bit = w;
    } else {
      throw data_error("gate model: unknown weight '" + key + "'");
    }
  }
  try {
    gm.validate();
  } catch (const std::invalid_argument& e) {
    throw data_error(e.what());
  }
  return gm;
}

GateModel GateModel::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw data_error("cannot open gate model file: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("gate model " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string_view cost_module_name(CostModule m) {
  switch (m) {
    case CostModule::item_memory: return "item_memory";
    case CostModule::binding: return "binding";
    case CostModule::spatial_bundle: return "spatial_bundle";
    case CostModule::temporal_bundle: return "temporal_bundle";
    case CostModule::associative_memory: return "associative_memory";
  }
  throw std::invalid_argument("unknown cost module");
}

double ModuleAreas::total() const {
  double sum = 0.0;
  for (double g : ge) sum += g;
  return sum;
}

double ModuleAreas::share_percent(CostModule m) const {
  const double t = total();
  if (t <= 0.0) throw std::logic_error("area breakdown: empty ledger");
  return 100.0 * (*this)[m] / t;
}

// Structural formulas. Notation: C channels, D = HV dimension, S segments,
// L = D/S segment length, P = ceil(log2 L) position bits, F frame length.
//
//                      sparse baseline       sparse optimized      dense
//  item_memory         C*64*D LUT bits       C*64*S*P LUT bits     C*64*D LUT bits
//  binding             C*S one-hot encoders  C*S P-bit modular     C*D XOR
//                      (P*(L/2-1) OR2) +     adders (P FA)
//                      barrels (L*P MUX2)
//  spatial_bundle      D trees of C-1 FA     D trees of C-1 OR2    D trees of C-1 FA
//                      nodes                 nodes                 nodes
//  temporal_bundle     D 8-bit counters: 8 register bits + an 8-bit adder (8 FA)
//  associative_memory  D AND2 (overlap) or D XOR2 (Hamming, dense) + one
//                      popcount tree of D-1 FA nodes
//
// The electrode store is identical across variants and tiny next to the code
// tables, so it is left out; similarity comparators and threshold logic are
// single-gate-order terms likewise omitted.
ModuleAreas estimate_area(const PipelineConfig& cfg, const GateModel& gates) {
  cfg.validate();
  gates.validate();

  const double channels = cfg.num_channels;
  const double dim = cfg.hv.dimension;
  const double segments = cfg.hv.segments;
  const double seg_len = cfg.hv.segment_length;
  const double pos_bits = cfg.hv.position_bits();
  const double codes = kLbpCodes;

  ModuleAreas area;
  switch (cfg.variant) {
    case Variant::sparse_baseline:
      area[CostModule::item_memory] = channels * codes * dim * gates.lut_bit;
      area[CostModule::binding] =
          channels * segments *
          (pos_bits * (seg_len / 2.0 - 1.0) * gates.or2 +  // one-hot -> position
           seg_len * pos_bits * gates.mux2);               // barrel shifter
      area[CostModule::spatial_bundle] =
          dim * tree_nodes(cfg.num_channels) * gates.full_adder;
      break;
    case Variant::sparse_optimized:
      area[CostModule::item_memory] =
          channels * codes * segments * pos_bits * gates.lut_bit;
      area[CostModule::binding] = channels * segments * pos_bits * gates.full_adder;
      area[CostModule::spatial_bundle] = dim * tree_nodes(cfg.num_channels) * gates.or2;
      break;
    case Variant::dense:
      area[CostModule::item_memory] = channels * codes * dim * gates.lut_bit;
      area[CostModule::binding] = channels * dim * gates.xor2;
      area[CostModule::spatial_bundle] =
          dim * tree_nodes(cfg.num_channels) * gates.full_adder;
      break;
  }
  area[CostModule::temporal_bundle] =
      dim * (8.0 * gates.register_bit + 8.0 * gates.full_adder);
  const double match_gate = cfg.variant == Variant::dense ? gates.xor2 : gates.and2;
  area[CostModule::associative_memory] =
      dim * match_gate + (dim - 1.0) * gates.full_adder;
  return area;
}

std::uint64_t CostLedger::total_toggles() const {
  std::uint64_t sum = 0;
  for (std::uint64_t t : toggles) sum += t;
  return sum;
}

double CostLedger::toggles_per_cycle() const {
  if (cycles == 0) throw std::logic_error("cost ledger: no cycles simulated");
  return static_cast<double>(total_toggles()) / static_cast<double>(cycles);
}

double CostLedger::toggle_share_percent(CostModule m) const {
  if (cycles == 0) throw std::logic_error("cost ledger: no cycles simulated");
  const std::uint64_t total = total_toggles();
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(toggle_count(m)) / static_cast<double>(total);
}

double CostLedger::im_output_toggle_rate() const {
  if (cycles == 0 || im_output_bits == 0) {
    throw std::logic_error("cost ledger: no cycles simulated");
  }
  return static_cast<double>(toggle_count(CostModule::item_memory)) /
         (static_cast<double>(cycles) * static_cast<double>(im_output_bits));
}

std::uint64_t count_toggles(const BinaryHv& prev, const BinaryHv& next) {
  if (prev.dimension() != next.dimension()) {
    throw std::invalid_argument("count_toggles: dimension mismatch");
  }
  std::uint64_t toggled = 0;
  const auto a = prev.words();
  const auto b = next.words();
  for (std::size_t i = 0; i < a.size(); ++i) {
    toggled += std::popcount(a[i] ^ b[i]);
  }
  return toggled;
}

namespace {

nlohmann::json report_to_json(const CostReport& r) {
  nlohmann::json toggles;
  nlohmann::json toggle_share;
  nlohmann::json area;
  nlohmann::json area_share;
  for (CostModule m : kCostModules) {
    const std::string name{cost_module_name(m)};
    toggles[name] = r.ledger.toggle_count(m);
    toggle_share[name] = r.ledger.toggle_share_percent(m);
    area[name] = r.area[m];
    area_share[name] = r.area.share_percent(m);
  }
  return {
      {"variant", std::string(variant_name(r.variant))},
      {"cycles", r.ledger.cycles},
      {"frames", r.ledger.frames},
      {"toggles", toggles},
      {"toggles_per_cycle", r.ledger.toggles_per_cycle()},
      {"toggle_share_percent", toggle_share},
      {"im_output_toggle_rate", r.ledger.im_output_toggle_rate()},
      {"area_ge", area},
      {"area_total_ge", r.area.total()},
      {"area_share_percent", area_share},
  };
}

nlohmann::json ratios_to_json(const CostRatios& r) {
  return {
      {"energy", r.energy},
      {"area", r.area},
      {"reference_energy", r.reference_energy},
      {"reference_area", r.reference_area},
  };
}

}  // namespace

nlohmann::json CostComparison::to_json() const {
  nlohmann::json j;
  j["variants"] = nlohmann::json::array();
  for (const CostReport& r : reports) j["variants"].push_back(report_to_json(r));
  j["ratios"] = nlohmann::json::object();
  if (baseline_over_optimized) {
    j["ratios"]["sparse_baseline_over_optimized"] = ratios_to_json(*baseline_over_optimized);
  }
  if (dense_over_optimized) {
    j["ratios"]["dense_over_optimized"] = ratios_to_json(*dense_over_optimized);
  }
  return j;
}

void CostComparison::write_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw data_error("cannot open for writing: " + path.string());
  os << "variant,module,area_ge,area_share_percent,toggles,toggles_per_cycle,"
        "toggle_share_percent\n";
  for (const CostReport& r : reports) {
    const double cycles = static_cast<double>(r.ledger.cycles);
    for (CostModule m : kCostModules) {
      os << variant_name(r.variant) << ',' << cost_module_name(m) << ','
         << r.area[m] << ',' << r.area.share_percent(m) << ','
         << r.ledger.toggle_count(m) << ','
         << static_cast<double>(r.ledger.toggle_count(m)) / cycles << ','
         << r.ledger.toggle_share_percent(m) << '\n';
    }
  }
  if (!os) throw data_error("failed writing: " + path.string());
}

CostComparison report_breakdown(std::span<const CostReport> reports) {
  CostComparison cmp;
  const CostReport* optimized = nullptr;
  const CostReport* baseline = nullptr;
  const CostReport* dense = nullptr;
  for (const CostReport& r : reports) {
    if (r.ledger.cycles == 0) {
      throw std::logic_error("cost report: ledger has no simulated cycles");
    }
    cmp.reports.push_back(r);
    switch (r.variant) {
      case Variant::sparse_optimized: optimized = &r; break;
      case Variant::sparse_baseline: baseline = &r; break;
      case Variant::dense: dense = &r; break;
    }
  }
  auto ratios_against = [&](const CostReport& other, double ref_energy,
                            double ref_area) {
    CostRatios r;
    r.energy = other.ledger.toggles_per_cycle() / optimized->ledger.toggles_per_cycle();
    r.area = other.area.total() / optimized->area.total();
    r.reference_energy = ref_energy;
    r.reference_area = ref_area;
    return r;
  };
  if (optimized != nullptr && baseline != nullptr) {
    cmp.baseline_over_optimized = ratios_against(
        *baseline, kReferenceEnergyGainVsBaseline, kReferenceAreaGainVsBaseline);
  }
  if (optimized != nullptr && dense != nullptr) {
    cmp.dense_over_optimized =
        ratios_against(*dense, kReferenceEnergyGainVsDense, kReferenceAreaGainVsDense);
  }
  return cmp;
}

}  // namespace shdc
