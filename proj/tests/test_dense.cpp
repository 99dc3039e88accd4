#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "shdc/dense.hpp"
#include "shdc/item_memory.hpp"
#include "shdc/prng.hpp"

using namespace shdc;

namespace {

BinaryHv random_dense_hv(SplitMix64& rng, std::uint32_t dimension) {
  BinaryHv hv(dimension);
  for (auto& w : hv.words()) w = rng.next();
  return hv;  // dimension is a multiple of 64 in these tests
}

}  // namespace

TEST_CASE("dense item memory generation") {
  DenseItemMemory a = DenseItemMemory::generate(5, 16, 1024);
  DenseItemMemory b = DenseItemMemory::generate(5, 16, 1024);
  CHECK(a == b);
  CHECK(a != DenseItemMemory::generate(6, 16, 1024));

  // Mean entry density is a fair coin; with 16*64 entries of 1024 bits the
  // sample mean sits extremely close to one half.
  double total = 0;
  for (std::uint32_t c = 0; c < 16; ++c) {
    for (std::uint32_t v = 0; v < kLbpCodes; ++v) total += a.lookup(c, v).density();
  }
  const double mean = total / (16 * kLbpCodes);
  CHECK(mean > 0.49);
  CHECK(mean < 0.51);

  CHECK_THROWS_AS(a.lookup(16, 0), std::invalid_argument);
  CHECK_THROWS_AS(a.lookup(0, 64), std::invalid_argument);
  CHECK_THROWS_AS(a.electrode(16), std::invalid_argument);
  CHECK_THROWS_AS(DenseItemMemory::generate(1, 0, 1024), std::invalid_argument);
}

TEST_CASE("xor binding algebra") {
  SplitMix64 rng(0xd1);
  const BinaryHv zero(1024);
  for (int n = 0; n < 200; ++n) {
    BinaryHv a = random_dense_hv(rng, 1024);
    BinaryHv b = random_dense_hv(rng, 1024);
    CHECK(xor_bind(a, a) == zero);
    CHECK(xor_bind(a, zero) == a);
    CHECK(xor_bind(xor_bind(a, b), b) == a);  // self-inverse
    // Per-bit oracle.
    const auto bits_a = oracle::bits_of(a);
    const auto bits_b = oracle::bits_of(b);
    const auto bits_out = oracle::bits_of(xor_bind(a, b));
    for (std::size_t i = 0; i < bits_out.size(); ++i) {
      CHECK(bits_out[i] == (bits_a[i] ^ bits_b[i]));
    }
  }
  BinaryHv small(64);
  CHECK_THROWS_AS(xor_bind(small, zero), std::invalid_argument);
}

TEST_CASE("majority bundle") {
  SplitMix64 rng(0xd2);

  SUBCASE("two of three wins") {
    BinaryHv a(64), b(64), c(64);
    a.set_bit(3);
    b.set_bit(3);
    c.set_bit(9);
    std::vector<BinaryHv> inputs = {a, b, c};
    BinaryHv out = majority_bundle(inputs);
    CHECK(out.bit(3));
    CHECK_FALSE(out.bit(9));
    CHECK(out.popcount() == 1);
  }

  SUBCASE("identical inputs are a fixed point") {
    BinaryHv a = random_dense_hv(rng, 1024);
    std::vector<BinaryHv> inputs(64, a);
    CHECK(majority_bundle(inputs) == a);
  }

  SUBCASE("even split loses") {
    BinaryHv a(64), b(64);
    a.set_bit(1);
    std::vector<BinaryHv> inputs = {a, b};  // bit 1 in exactly half the inputs
    CHECK(majority_bundle(inputs).popcount() == 0);
  }

  SUBCASE("matches the counting oracle") {
    for (std::size_t k : {1, 2, 3, 7, 64}) {
      std::vector<BinaryHv> inputs;
      std::vector<std::vector<int>> raw;
      for (std::size_t i = 0; i < k; ++i) {
        inputs.push_back(random_dense_hv(rng, 1024));
        raw.push_back(oracle::bits_of(inputs.back()));
      }
      const auto threshold = static_cast<std::uint32_t>(k / 2 + 1);
      CHECK(oracle::bits_of(majority_bundle(inputs)) == oracle::bundle_count(raw, threshold));
    }
    CHECK_THROWS_AS(majority_bundle({}), std::invalid_argument);
  }
}

TEST_CASE("hamming distance matches oracle") {
  SplitMix64 rng(0xd3);
  for (int n = 0; n < 200; ++n) {
    BinaryHv a = random_dense_hv(rng, 1024);
    BinaryHv b = random_dense_hv(rng, 1024);
    CHECK(hamming_distance(a, b) == oracle::hamming(oracle::bits_of(a), oracle::bits_of(b)));
    CHECK(hamming_distance(a, a) == 0);
  }
  BinaryHv small(64);
  CHECK_THROWS_AS(hamming_distance(small, random_dense_hv(rng, 1024)), std::invalid_argument);
}

TEST_CASE("switching probability: sparse item memory near two percent, dense near half") {
  const HvConfig cfg;
  ItemMemory sparse_im = ItemMemory::generate(0x51ee, 1, cfg);
  DenseItemMemory dense_im = DenseItemMemory::generate(0x51ee, 1, cfg.dimension);
  SplitMix64 rng(0x900d);

  const int cycles = 20000;
  std::uint64_t sparse_toggles = 0;
  std::uint64_t dense_toggles = 0;
  auto prev_code = static_cast<std::uint32_t>(rng.next_below(kLbpCodes));
  for (int i = 0; i < cycles; ++i) {
    const auto code = static_cast<std::uint32_t>(rng.next_below(kLbpCodes));
    sparse_toggles += hamming_distance(sparse_im.lookup(0, prev_code), sparse_im.lookup(0, code));
    dense_toggles += hamming_distance(dense_im.lookup(0, prev_code), dense_im.lookup(0, code));
    prev_code = code;
  }
  const double denom = static_cast<double>(cycles) * cfg.dimension;
  const double sparse_prob = static_cast<double>(sparse_toggles) / denom;
  const double dense_prob = static_cast<double>(dense_toggles) / denom;
  CHECK(sparse_prob > 0.01);
  CHECK(sparse_prob < 0.03);
  CHECK(dense_prob > 0.45);
  CHECK(dense_prob < 0.55);
}
