#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mprecon/hashing.hpp"
#include "mprecon/rng.hpp"

using namespace mprecon;

// Frozen from an independent reimplementation of the digest in Python.
TEST(Digest, GoldenVectors) {
  EXPECT_EQ(mix64(0), 0u);
  EXPECT_EQ(mix64(1), 0x5692161d100b05e5ULL);
  EXPECT_EQ(mix64(0xDEADBEEF), 0x4e062702ec929eeaULL);
  EXPECT_EQ(digest(0, 0, 0), 0x31042cc5515af7eeULL);
  EXPECT_EQ(digest(1, 2, 3), 0xdaa92e92ce8c93f7ULL);
  EXPECT_EQ(digest(42, kChecksumDomain, 123456789), 0x39212be8ba0661deULL);
  EXPECT_EQ(digest(~0ULL, 6, ~0ULL), 0x4a2cc88254a2d8e6ULL);
  EXPECT_EQ(derive_seed(7, 3), 0xea57e9f3429ea787ULL);
}

TEST(CellPositions, GoldenVectors) {
  HashConfig cfg{4, 8, 99, 5, 1ULL << 32};
  EXPECT_EQ(cell_positions(1000, cfg), (std::vector<std::size_t>{0, 9, 19, 31}));
  EXPECT_EQ(cell_positions(1000, doubled(cfg)), (std::vector<std::size_t>{0, 19, 38, 63}));
  EXPECT_EQ(checksum(1000, cfg), 2276867325u);
}

TEST(CellPositions, OnePerSubtable) {
  HashConfig cfg{4, 8, 1, 2, 1ULL << 32};
  for (std::uint64_t key = 0; key < 1000; ++key) {
    auto pos = cell_positions(key * 7919, cfg);
    ASSERT_EQ(pos.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
      ASSERT_GE(pos[i], 8 * i);
      ASSERT_LT(pos[i], 8 * (i + 1));
    }
    ASSERT_EQ(pos, cell_positions(key * 7919, cfg));
  }
}

TEST(CellPositions, DoublingAppendsOneBit) {
  Rng rng(11);
  for (std::uint32_t s : {1u, 3u, 64u, 1000u}) {
    HashConfig cfg{5, s, rng.next(), rng.next(), 1ULL << 32};
    for (int trial = 0; trial < 500; ++trial) {
      const std::uint64_t key = rng.next();
      for (unsigned i = 0; i < cfg.k; ++i) {
        const auto off = subtable_offset(key, i, cfg);
        const auto big = subtable_offset(key, i, doubled(cfg));
        ASSERT_EQ(big / 2, off);
      }
    }
  }
}

TEST(CellPositions, ChiSquareUniform) {
  HashConfig cfg{3, 64, 12345, 0, 1ULL << 32};
  std::vector<double> counts(64, 0);
  const int samples = 64000;
  for (int key = 0; key < samples; ++key) counts[subtable_offset(key, 1, cfg)] += 1;
  double chi2 = 0;
  const double expected = samples / 64.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 63 degrees of freedom; 0.999 quantile is about 103.4.
  EXPECT_LT(chi2, 103.4);
}

TEST(CellPositions, SubtablesAreIndependentlySeeded) {
  HashConfig cfg{4, 1024, 3, 0, 1ULL << 32};
  int same = 0;
  for (std::uint64_t key = 0; key < 10000; ++key) same += subtable_offset(key, 0, cfg) == subtable_offset(key, 1, cfg);
  EXPECT_LT(same, 40);  // about 10 expected
}

TEST(Checksum, RangeAndDeterminism) {
  HashConfig cfg{4, 8, 1, 77, 1ULL << 32};
  for (std::uint64_t key = 0; key < 1000; ++key) {
    ASSERT_LT(checksum(key, cfg), 1ULL << 32);
    ASSERT_EQ(checksum(key, cfg), checksum(key, cfg));
  }
  cfg.q = 256;
  for (std::uint64_t key = 0; key < 1000; ++key) ASSERT_LT(checksum(key, cfg), 256u);
}

TEST(Checksum, FalseMatchRateNearOneOverQ) {
  HashConfig cfg{4, 8, 1, 77, 256};
  const std::uint64_t target = checksum(424242, cfg);
  Rng rng(5);
  const int samples = 1000000;
  int hits = 0;
  for (int i = 0; i < samples; ++i) hits += checksum(rng.next(), cfg) == target;
  const double mean = samples / 256.0;
  const double sigma = std::sqrt(samples * (1.0 / 256) * (255.0 / 256));
  EXPECT_LT(std::abs(hits - mean), 3 * sigma);
}

TEST(HashConfig, Validation) {
  HashConfig cfg;
  cfg.k = 2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.k = 4;
  cfg.q = 100;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.q = 128;
  EXPECT_NO_THROW(cfg.validate());
}
