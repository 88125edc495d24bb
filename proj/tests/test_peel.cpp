#include <gtest/gtest.h>

#include <algorithm>
#include <array>

#include "mprecon/peel.hpp"
#include "mprecon/rng.hpp"
#include "mprecon/workload.hpp"

using namespace mprecon;

namespace {

HashConfig config(unsigned k, std::uint32_t sub, std::uint64_t seed = 1) {
  return HashConfig{k, sub, derive_seed(seed, 1), derive_seed(seed, 2), 1ULL << 32};
}

std::vector<std::uint64_t> keys_of(const PeelResult& r) {
  std::vector<std::uint64_t> out;
  for (const auto& e : r.entries) out.push_back(e.key);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Peel, EmptySketch) {
  const PeelResult r = peel(Sketch(FieldParams(7, 1ULL << 32), config(4, 8)));
  EXPECT_TRUE(r.entries.empty());
  EXPECT_TRUE(r.complete);
}

TEST(Peel, MultiplicityTwoModThree) {
  const FieldParams f(3, 1ULL << 32);
  Sketch s(f, config(4, 8));
  s.insert(4242, Scalar{1});
  s.insert(4242, Scalar{1});
  const PeelResult r = peel(s);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].key, 4242u);
  EXPECT_EQ(r.entries[0].multiplicity.value, 2u);
  EXPECT_TRUE(r.complete);
}

TEST(Peel, CountOneOverThreeKeysIsNotPure) {
  // One cell per subtable, so all three keys share every cell.
  const FieldParams f(1000000007, 1ULL << 32);
  Sketch s(f, config(4, 1));
  s.insert(10, Scalar{1});
  s.insert(20, Scalar{1});
  s.insert(5, Scalar{f.p() - 1});
  EXPECT_EQ(s.count(0), 1u);
  EXPECT_FALSE(s.verify_pure(0, Scalar{1}));
  const PeelResult r = peel(s);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_FALSE(r.complete);
}

TEST(Peel, RecoversRandomSetsWithSignedCoefficients) {
  const FieldParams f(1000000007, 1ULL << 32);
  Rng rng(8);
  int complete = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto keys = random_distinct_keys(50, rng);
    Sketch s(f, config(4, static_cast<std::uint32_t>(size_for(50, 4, 0.5) / 4), trial));
    std::vector<Scalar> coeff;
    for (auto x : keys) {
      coeff.push_back(rng.nonzero(f));
      s.insert(x, coeff.back());
    }
    const PeelResult r = peel(s);
    if (!r.complete) continue;
    ++complete;
    ASSERT_EQ(r.entries.size(), keys.size());
    for (const auto& e : r.entries) {
      const auto it = std::find(keys.begin(), keys.end(), e.key);
      ASSERT_NE(it, keys.end());
      ASSERT_EQ(e.multiplicity.value, coeff[it - keys.begin()].value);
    }
  }
  EXPECT_GE(complete, 190);
}

TEST(Peel, ReportsParityBitsOfPeeledKeys) {
  const FieldParams f(1000000007, 1ULL << 32);
  const HashConfig cfg = config(4, 16);
  Sketch s(f, cfg, 3);
  s.insert(100, Scalar{1}, 0);
  s.insert(100, Scalar{1}, 2);
  s.insert(200, Scalar{1}, 1);
  const PeelResult r = peel(s);
  ASSERT_TRUE(r.complete);
  for (const auto& e : r.entries) {
    ASSERT_TRUE(e.ids);
    EXPECT_EQ((*e.ids)[0], e.key == 100 ? 0b101u : 0b010u);
  }
}

TEST(Peel, Idempotent) {
  const FieldParams f(1000000007, 1ULL << 32);
  Rng rng(9);
  const HashConfig cfg = config(5, 20);
  const Sketch s = build_sketch(random_distinct_keys(40, rng), f, cfg);
  const PeelResult a = peel(s);
  const PeelResult b = peel(s);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(a.complete, b.complete);
}

TEST(PeelNoCount, ThreePartySumRecoversBothMultiplicities) {
  const FieldParams f(3, 1ULL << 32);
  const HashConfig cfg = config(4, 16);
  Sketch z(f, cfg);
  z.insert(11, Scalar{1});  // held by one party
  z.insert(22, Scalar{1});  // held by two parties
  z.insert(22, Scalar{1});
  const std::array<Scalar, 2> both{Scalar{1}, Scalar{2}};
  const PeelResult r = peel_no_count(z, both);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(keys_of(r), (std::vector<std::uint64_t>{11, 22}));
  for (const auto& e : r.entries) EXPECT_EQ(e.multiplicity.value, e.key == 11 ? 1u : 2u);

  const std::array<Scalar, 1> ones{Scalar{1}};
  const PeelResult partial = peel_no_count(z, ones);
  EXPECT_FALSE(partial.complete);
  EXPECT_EQ(keys_of(partial), (std::vector<std::uint64_t>{11}));
}
