#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shdc/cost_model.hpp"
#include "shdc/cost_sim.hpp"
#include "shdc/errors.hpp"
#include "shdc/prng.hpp"
#include "shdc/synth.hpp"

using namespace shdc;

namespace {

PipelineConfig variant_config(Variant v, std::uint32_t channels = 64) {
  PipelineConfig cfg;
  cfg.variant = v;
  cfg.num_channels = channels;
  if (v == Variant::sparse_baseline) cfg.spatial_threshold = 1;
  if (v == Variant::dense) cfg.temporal_threshold = 128;
  return cfg;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("gate model configuration") {
  GateModel gm;
  CHECK_NOTHROW(gm.validate());

  SUBCASE("partial json overrides") {
    const GateModel loaded = GateModel::from_json({{"full_adder", 3.0}, {"lut_bit", 0.5}});
    CHECK(loaded.full_adder == 3.0);
    CHECK(loaded.lut_bit == 0.5);
    CHECK(loaded.or2 == gm.or2);  // untouched defaults survive
    CHECK(loaded.mux2 == gm.mux2);
  }
  SUBCASE("bad inputs") {
    CHECK_THROWS_AS(GateModel::from_json({{"nand3", 1.0}}), data_error);
    CHECK_THROWS_AS(GateModel::from_json({{"or2", "cheap"}}), data_error);
    CHECK_THROWS_AS(GateModel::from_json({{"or2", -1.0}}), data_error);
    CHECK_THROWS_AS(GateModel::from_json(nlohmann::json::array()), data_error);
    CHECK_THROWS_AS(GateModel::load(temp_file("shdc_gates_missing.json")), data_error);
  }
  SUBCASE("file round trip") {
    gm.register_bit = 6.0;
    const auto path = temp_file("shdc_gates.json");
    std::ofstream(path) << gm.to_json();
    CHECK(GateModel::load(path) == gm);
    std::filesystem::remove(path);
  }
}

TEST_CASE("count_toggles is popcount of xor") {
  SplitMix64 rng(0x70661e);
  for (int n = 0; n < 200; ++n) {
    BinaryHv a(1024);
    BinaryHv b(1024);
    for (auto& w : a.words()) w = rng.next();
    for (auto& w : b.words()) w = rng.next();
    CHECK(count_toggles(a, b) == oracle::hamming(oracle::bits_of(a), oracle::bits_of(b)));
  }
  BinaryHv a(1024);
  CHECK(count_toggles(a, a) == 0);
  CHECK_THROWS_AS(count_toggles(a, BinaryHv(512)), std::invalid_argument);
}

TEST_CASE("structural area estimates match hand-expanded formulas") {
  const GateModel gm;

  // Worked by hand from the documented formulas with default weights:
  //   baseline  IM 64*64*1024*0.25          = 1,048,576
  //             binding 64*8*(441 + 896*1.5)=   913,920
  //             spatial 1024*63*2.5         =   161,280
  //   optimized IM 64*64*56*0.25            =    57,344
  //             binding 64*8*7*2.5          =     8,960
  //             spatial 1024*63*1           =    64,512
  //   dense     binding 64*1024*1.5         =    98,304
  //   shared    temporal 1024*(8*4 + 8*2.5) =    53,248
  //             AM 1024*1 + 1023*2.5        =   3,581.5 (XOR match: 4,093.5)
  const ModuleAreas baseline = estimate_area(variant_config(Variant::sparse_baseline), gm);
  CHECK(baseline[CostModule::item_memory] == doctest::Approx(1048576.0));
  CHECK(baseline[CostModule::binding] == doctest::Approx(913920.0));
  CHECK(baseline[CostModule::spatial_bundle] == doctest::Approx(161280.0));
  CHECK(baseline[CostModule::temporal_bundle] == doctest::Approx(53248.0));
  CHECK(baseline[CostModule::associative_memory] == doctest::Approx(3581.5));
  CHECK(baseline.total() == doctest::Approx(2180605.5));

  const ModuleAreas optimized = estimate_area(variant_config(Variant::sparse_optimized), gm);
  CHECK(optimized[CostModule::item_memory] == doctest::Approx(57344.0));
  CHECK(optimized[CostModule::binding] == doctest::Approx(8960.0));
  CHECK(optimized[CostModule::spatial_bundle] == doctest::Approx(64512.0));
  CHECK(optimized.total() == doctest::Approx(187645.5));

  const ModuleAreas dense = estimate_area(variant_config(Variant::dense), gm);
  CHECK(dense[CostModule::item_memory] == doctest::Approx(1048576.0));
  CHECK(dense[CostModule::binding] == doctest::Approx(98304.0));
  CHECK(dense[CostModule::associative_memory] == doctest::Approx(4093.5));
  CHECK(dense.total() == doctest::Approx(1365501.5));

  // Compressed entries store 56 of 1024 bits.
  CHECK(optimized[CostModule::item_memory] / baseline[CostModule::item_memory] ==
        doctest::Approx(56.0 / 1024.0));
  // OR nodes are strictly cheaper than full-adder nodes.
  CHECK(optimized[CostModule::spatial_bundle] < baseline[CostModule::spatial_bundle]);
  // Ordering of the totals that the proxy claims.
  CHECK(optimized.total() < baseline.total());
  CHECK(optimized.total() < dense.total());

  // Shares sum to 100.
  for (const ModuleAreas& area : {baseline, optimized, dense}) {
    double sum = 0.0;
    for (CostModule m : kCostModules) sum += area.share_percent(m);
    CHECK(sum == doctest::Approx(100.0).epsilon(0.001));
  }
}

TEST_CASE("simulator registers mirror the pipeline bit for bit") {
  SplitMix64 rng(0x51b);
  const HvConfig hv;
  const CompressedItemMemory cim = CompressedItemMemory::generate(8, 8, hv);
  const DenseItemMemory dim = DenseItemMemory::generate(8, 8, 1024);

  auto drive = [&](const PipelineConfig& cfg, auto& memory) {
    Pipeline pipeline(cfg, memory);
    CostSimulator sim(cfg, memory);
    std::vector<BinaryHv> frame;
    for (std::uint32_t t = 0; t < cfg.frame_length; ++t) {
      std::vector<std::uint8_t> codes(cfg.num_channels);
      for (auto& c : codes) c = static_cast<std::uint8_t>(rng.next_below(kLbpCodes));
      sim.step(codes);
      const BinaryHv expect = pipeline.spatial_encode(codes);
      REQUIRE(sim.spatial_output() == expect);
      frame.push_back(expect);
    }
    REQUIRE(sim.last_frame_hv().has_value());
    CHECK(*sim.last_frame_hv() == pipeline.temporal_encode(frame));
    CHECK(sim.ledger().cycles == cfg.frame_length);
    CHECK(sim.ledger().frames == 1);
  };
  drive(variant_config(Variant::sparse_baseline, 8), cim);
  drive(variant_config(Variant::sparse_optimized, 8), cim);
  drive(variant_config(Variant::dense, 8), dim);

  SUBCASE("baseline with a counting threshold above one") {
    PipelineConfig cfg = variant_config(Variant::sparse_baseline, 8);
    cfg.spatial_threshold = 2;
    drive(cfg, cim);
  }
}

TEST_CASE("recording-driven simulation reproduces inference predictions") {
  SynthConfig synth;
  synth.num_channels = 8;
  synth.duration_seconds = 60.0;
  synth.num_seizures = 2;
  synth.seizure_seconds = 10.0;
  const Recording rec = synth_recording(synth);
  const CompressedItemMemory cim = CompressedItemMemory::generate(21, 8, HvConfig{});
  const PipelineConfig cfg = variant_config(Variant::sparse_optimized, 8);

  Pipeline pipeline(cfg, cim);
  const AssociativeMemory am = pipeline.train_one_shot(rec, 0);
  const DetectionReport report = pipeline.run_inference(rec, am);

  const SimulationResult sim = simulate_recording(cfg, cim, rec, &am);
  CHECK(sim.trace == report.trace);
  CHECK(sim.ledger.frames == report.num_frames);

  SUBCASE("cycle cap rounds down to whole frames") {
    const SimulationResult capped = simulate_recording(cfg, cim, rec, &am, 300);
    CHECK(capped.ledger.cycles == 256);
    CHECK(capped.ledger.frames == 1);
    CHECK(capped.trace.size() == 1);
    CHECK(capped.trace[0] == report.trace[0]);
  }
  SUBCASE("channel mismatch is rejected") {
    Recording wrong(4, 512, 1024);
    CHECK_THROWS_AS(simulate_recording(cfg, cim, wrong, nullptr), std::invalid_argument);
  }
}

TEST_CASE("switching activity: orderings and item-memory rates") {
  const std::uint64_t cycles = 10000;
  const HvConfig hv;
  const CompressedItemMemory cim = CompressedItemMemory::generate(4242, 64, hv);
  const DenseItemMemory dim = DenseItemMemory::generate(4242, 64, 1024);

  const CostLedger baseline =
      simulate_random_codes(variant_config(Variant::sparse_baseline), cim, cycles, 7);
  const CostLedger optimized =
      simulate_random_codes(variant_config(Variant::sparse_optimized), cim, cycles, 7);
  const CostLedger dense =
      simulate_random_codes(variant_config(Variant::dense), dim, cycles, 7);

  // Energy-proxy ordering.
  CHECK(optimized.toggles_per_cycle() < baseline.toggles_per_cycle());
  CHECK(baseline.toggles_per_cycle() < dense.toggles_per_cycle());

  // Per-bit switching probability at the IM output registers: around 2% for
  // the sparse read-out, around half for the dense one.
  CHECK(baseline.im_output_toggle_rate() > 0.01);
  CHECK(baseline.im_output_toggle_rate() < 0.03);
  CHECK(dense.im_output_toggle_rate() > 0.45);
  CHECK(dense.im_output_toggle_rate() < 0.55);

  SUBCASE("identical seeds give identical ledgers") {
    const CostLedger again =
        simulate_random_codes(variant_config(Variant::sparse_optimized), cim, 2048, 7);
    const CostLedger thrice =
        simulate_random_codes(variant_config(Variant::sparse_optimized), cim, 2048, 7);
    CHECK(again.toggles == thrice.toggles);
  }

  SUBCASE("breakdown report") {
    const GateModel gm;
    std::vector<CostReport> reports = {
        {Variant::sparse_baseline, estimate_area(variant_config(Variant::sparse_baseline), gm),
         baseline},
        {Variant::sparse_optimized,
         estimate_area(variant_config(Variant::sparse_optimized), gm), optimized},
        {Variant::dense, estimate_area(variant_config(Variant::dense), gm), dense},
    };
    const CostComparison cmp = report_breakdown(reports);
    REQUIRE(cmp.baseline_over_optimized.has_value());
    REQUIRE(cmp.dense_over_optimized.has_value());
    CHECK(cmp.baseline_over_optimized->energy > 1.0);
    CHECK(cmp.baseline_over_optimized->area > 1.0);
    CHECK(cmp.dense_over_optimized->energy > 1.0);
    CHECK(cmp.dense_over_optimized->area > 1.0);
    CHECK(cmp.baseline_over_optimized->reference_energy == 1.72);
    CHECK(cmp.baseline_over_optimized->reference_area == 2.20);
    CHECK(cmp.dense_over_optimized->reference_energy == 7.50);
    CHECK(cmp.dense_over_optimized->reference_area == 3.24);

    const nlohmann::json j = cmp.to_json();
    CHECK(j["variants"].size() == 3);
    CHECK(j["ratios"].contains("sparse_baseline_over_optimized"));
    // Toggle shares also sum to 100 per variant.
    for (const auto& row : j["variants"]) {
      double sum = 0.0;
      for (CostModule m : kCostModules) {
        sum += row["toggle_share_percent"][std::string(cost_module_name(m))].get<double>();
      }
      CHECK(sum == doctest::Approx(100.0).epsilon(0.001));
    }

    const auto path = temp_file("shdc_cost.csv");
    cmp.write_csv(path);
    std::ifstream is(path);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 1 + 3 * kNumCostModules);
    std::filesystem::remove(path);

    CostReport empty;
    empty.variant = Variant::sparse_optimized;
    empty.area = reports[1].area;
    std::vector<CostReport> bad = {empty};
    CHECK_THROWS_AS(report_breakdown(bad), std::logic_error);
  }
}

TEST_CASE("empty ledger statistics are invalid-state errors") {
  CostLedger ledger;
  CHECK_THROWS_AS(ledger.toggles_per_cycle(), std::logic_error);
  CHECK_THROWS_AS(ledger.im_output_toggle_rate(), std::logic_error);
  CHECK_THROWS_AS(ledger.toggle_share_percent(CostModule::binding), std::logic_error);
  ledger.cycles = 10;
  ledger.im_output_bits = 64;
  CHECK(ledger.toggles_per_cycle() == 0.0);
  CHECK(ledger.im_output_toggle_rate() == 0.0);
}
