#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shdc/errors.hpp"
#include "shdc/hv.hpp"
#include "shdc/hv_ops.hpp"
#include "shdc/prng.hpp"

using namespace shdc;

namespace {

const HvConfig kCfg = HvConfig::make(1024, 8);

BinaryHv random_dense(SplitMix64& rng, std::uint32_t dimension) {
  BinaryHv hv(dimension);
  auto words = hv.words();
  for (auto& w : words) w = rng.next();
  // Mask tail bits so popcount bookkeeping stays exact.
  const std::uint32_t tail = dimension % 64;
  if (tail != 0) words[words.size() - 1] &= (std::uint64_t{1} << tail) - 1;
  return hv;
}

}  // namespace

TEST_CASE("hv config validation") {
  CHECK(kCfg.dimension == 1024);
  CHECK(kCfg.segments == 8);
  CHECK(kCfg.segment_length == 128);
  CHECK(kCfg.position_bits() == 7);
  CHECK_THROWS_AS(HvConfig::make(1000, 7), std::invalid_argument);
  CHECK_THROWS_AS(HvConfig::make(0, 8), std::invalid_argument);
  CHECK_THROWS_AS(HvConfig::make(1024, 0), std::invalid_argument);
}

TEST_CASE("binary hv bit accounting") {
  BinaryHv hv(1024);
  CHECK(hv.popcount() == 0);
  hv.set_bit(0);
  hv.set_bit(63);
  hv.set_bit(64);
  hv.set_bit(1023);
  CHECK(hv.popcount() == 4);
  CHECK(hv.bit(63));
  CHECK_FALSE(hv.bit(62));
  CHECK_THROWS_AS(hv.bit(1024), std::out_of_range);
  CHECK_THROWS_AS(hv.set_bit(4096), std::out_of_range);
}

TEST_CASE("atomic round trip through binary form") {
  SplitMix64 rng(0x11);
  for (int n = 0; n < 1000; ++n) {
    AtomicHv a = oracle::random_atomic(rng, kCfg);
    BinaryHv b = atomic_to_binary(a, kCfg);
    CHECK(b.popcount() == kCfg.segments);
    AtomicHv back = one_hot_decode(b, kCfg);
    CHECK(back.positions == a.positions);
  }
}

TEST_CASE("one hot decode rejects malformed segments") {
  BinaryHv empty(1024);
  CHECK_THROWS_AS(one_hot_decode(empty, kCfg), malformed_atomic_error);

  AtomicHv a;
  a.positions = {1, 2, 3, 4, 5, 6, 7, 8};
  BinaryHv doubled = atomic_to_binary(a, kCfg);
  doubled.set_bit(300);  // second 1-bit inside segment 2
  CHECK_THROWS_AS(one_hot_decode(doubled, kCfg), malformed_atomic_error);
}

TEST_CASE("position binding worked examples") {
  AtomicHv a, b;
  a.positions = {5, 120, 0, 0, 0, 0, 0, 127};
  b.positions = {3, 20, 0, 0, 0, 0, 0, 1};
  AtomicHv bound = bind_positions(a, b, kCfg);
  CHECK(bound.positions[0] == 8);    // 5 + 3
  CHECK(bound.positions[1] == 12);   // 120 + 20 wraps mod 128
  CHECK(bound.positions[7] == 0);    // 127 + 1 wraps to 0
  AtomicHv back = unbind_positions(bound, b, kCfg);
  CHECK(back.positions == a.positions);
}

TEST_CASE("barrel shift matches position arithmetic") {
  SplitMix64 rng(0x22);
  for (int n = 0; n < 10000; ++n) {
    AtomicHv a = oracle::random_atomic(rng, kCfg);
    AtomicHv k = oracle::random_atomic(rng, kCfg);
    BinaryHv via_positions = atomic_to_binary(bind_positions(a, k, kCfg), kCfg);
    BinaryHv via_barrel = bind_barrel(atomic_to_binary(a, kCfg), k.positions, kCfg);
    CHECK(via_barrel == via_positions);
  }
}

TEST_CASE("barrel shift matches bit-level oracle on dense input") {
  SplitMix64 rng(0x33);
  for (int n = 0; n < 200; ++n) {
    BinaryHv dense = random_dense(rng, kCfg.dimension);
    std::vector<std::uint32_t> shifts(kCfg.segments);
    for (auto& s : shifts) s = static_cast<std::uint32_t>(rng.next_below(kCfg.segment_length));
    BinaryHv shifted = bind_barrel(dense, shifts, kCfg);
    auto expect = oracle::segment_rotate(oracle::bits_of(dense), kCfg.segments,
                                         kCfg.segment_length, shifts);
    CHECK(oracle::bits_of(shifted) == expect);
    CHECK(shifted.popcount() == dense.popcount());
  }
}

TEST_CASE("barrel shift generic path for non word aligned segments") {
  const HvConfig cfg = HvConfig::make(800, 8);  // segment length 100
  SplitMix64 rng(0x44);
  for (int n = 0; n < 200; ++n) {
    BinaryHv dense = random_dense(rng, cfg.dimension);
    std::vector<std::uint32_t> shifts(cfg.segments);
    for (auto& s : shifts) s = static_cast<std::uint32_t>(rng.next_below(cfg.segment_length));
    BinaryHv shifted = bind_barrel(dense, shifts, cfg);
    auto expect = oracle::segment_rotate(oracle::bits_of(dense), cfg.segments,
                                         cfg.segment_length, shifts);
    CHECK(oracle::bits_of(shifted) == expect);
  }
  // Round trip for atomics under the same config.
  for (int n = 0; n < 500; ++n) {
    AtomicHv a = oracle::random_atomic(rng, cfg);
    CHECK(one_hot_decode(atomic_to_binary(a, cfg), cfg).positions == a.positions);
  }
}

TEST_CASE("binding rejects out of range inputs") {
  AtomicHv a = {{5, 120, 0, 0, 0, 0, 0, 127}};
  AtomicHv bad = {{128, 0, 0, 0, 0, 0, 0, 0}};
  CHECK_THROWS_AS(bind_positions(a, bad, kCfg), std::invalid_argument);
  std::vector<std::uint32_t> bad_shift = {0, 0, 0, 0, 0, 0, 0, 200};
  CHECK_THROWS_AS(bind_barrel(atomic_to_binary(a, kCfg), bad_shift, kCfg),
                  std::invalid_argument);
  std::vector<std::uint32_t> short_shift = {1, 2, 3};
  CHECK_THROWS_AS(bind_barrel(atomic_to_binary(a, kCfg), short_shift, kCfg),
                  std::invalid_argument);
}

TEST_CASE("bundle threshold matches counting oracle") {
  SplitMix64 rng(0x55);
  for (std::uint32_t threshold : {1u, 2u, 5u, 16u, 33u}) {
    std::vector<BinaryHv> inputs;
    std::vector<std::vector<int>> raw;
    for (int i = 0; i < 64; ++i) {
      inputs.push_back(random_dense(rng, 1024));
      raw.push_back(oracle::bits_of(inputs.back()));
    }
    BinaryHv out = bundle_threshold(inputs, threshold);
    CHECK(oracle::bits_of(out) == oracle::bundle_count(raw, threshold));
  }
  CHECK_THROWS_AS(bundle_threshold({}, 1), std::invalid_argument);
}

TEST_CASE("or bundle equals threshold one") {
  SplitMix64 rng(0x66);
  std::vector<BinaryHv> inputs;
  std::vector<std::vector<int>> raw;
  for (int i = 0; i < 64; ++i) {
    inputs.push_back(atomic_to_binary(oracle::random_atomic(rng, kCfg), kCfg));
    raw.push_back(oracle::bits_of(inputs.back()));
  }
  BinaryHv via_or = bundle_or(inputs);
  CHECK(via_or == bundle_threshold(inputs, 1));
  CHECK(oracle::bits_of(via_or) == oracle::bundle_or(raw));
}

TEST_CASE("accumulator saturates and thins like the oracle") {
  SplitMix64 rng(0x77);
  Accumulator acc(1024);
  std::vector<std::vector<int>> raw;
  for (int i = 0; i < 300; ++i) {  // enough frames to hit the 255 ceiling
    BinaryHv hv = random_dense(rng, 1024);
    acc.add(hv);
    raw.push_back(oracle::bits_of(hv));
  }
  for (std::uint32_t threshold : {1u, 130u, 200u, 255u, 256u}) {
    CHECK(oracle::bits_of(thin(acc, threshold)) == oracle::accumulate_thin(raw, threshold));
  }
  CHECK(thin(acc, 256).popcount() == 0);  // counters cap at 255
  CHECK_THROWS_AS(thin(acc, 0), std::invalid_argument);
  CHECK_THROWS_AS(thin(acc, 257), std::invalid_argument);
  acc.reset();
  CHECK(thin(acc, 1).popcount() == 0);
}

TEST_CASE("overlap similarity matches oracle") {
  SplitMix64 rng(0x88);
  for (int n = 0; n < 200; ++n) {
    BinaryHv a = random_dense(rng, 1024);
    BinaryHv b = random_dense(rng, 1024);
    CHECK(overlap_similarity(a, b) == oracle::overlap(oracle::bits_of(a), oracle::bits_of(b)));
  }
  BinaryHv small(64);
  CHECK_THROWS_AS(overlap_similarity(small, random_dense(rng, 1024)), std::invalid_argument);
}

TEST_CASE("random atomics are quasi orthogonal") {
  SplitMix64 rng(0x99);
  double total = 0;
  const int pairs = 2000;
  for (int n = 0; n < pairs; ++n) {
    BinaryHv a = atomic_to_binary(oracle::random_atomic(rng, kCfg), kCfg);
    BinaryHv b = atomic_to_binary(oracle::random_atomic(rng, kCfg), kCfg);
    total += overlap_similarity(a, b);
  }
  const double mean = total / pairs;  // expected S/L = 8/128 = 0.0625 bits
  CHECK(mean > 0.03);
  CHECK(mean < 0.10);
}

TEST_CASE("binding preserves self similarity and breaks cross similarity") {
  SplitMix64 rng(0xaa);
  for (int n = 0; n < 500; ++n) {
    AtomicHv a = oracle::random_atomic(rng, kCfg);
    AtomicHv k = oracle::random_atomic(rng, kCfg);
    BinaryHv bound = atomic_to_binary(bind_positions(a, k, kCfg), kCfg);
    CHECK(bound.popcount() == kCfg.segments);
    // Unbinding restores a perfect overlap of S bits.
    AtomicHv restored = unbind_positions(one_hot_decode(bound, kCfg), k, kCfg);
    CHECK(overlap_similarity(atomic_to_binary(restored, kCfg), atomic_to_binary(a, kCfg)) ==
          kCfg.segments);
  }
}
