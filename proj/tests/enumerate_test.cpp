#include "microrisk/enumerate.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "test_support.hpp"

namespace microrisk {
namespace {

using testing::sample_config;

std::vector<std::uint64_t> masks_of(const std::vector<KnownSet>& sets) {
  std::vector<std::uint64_t> masks;
  masks.reserve(sets.size());
  for (const auto& ks : sets) masks.push_back(ks.mask);
  return masks;
}

RiskConfig config_from_probs(const std::vector<double>& probs, double epsilon) {
  RiskConfig cfg;
  cfg.epsilon = epsilon;
  for (std::size_t j = 0; j < probs.size(); ++j)
    cfg.attributes.push_back({"a" + std::to_string(j), probs[j], 0.0, {}});
  return cfg;
}

TEST(KnownSetProbability, WorkedExample) {
  RiskConfig cfg = sample_config();
  std::vector<std::size_t> agr{0, 1, 2};
  EXPECT_NEAR(known_set_probability(cfg, std::span<const std::size_t>(agr)),
              0.168, 1e-15);
  EXPECT_DOUBLE_EQ(known_set_probability(cfg, std::uint64_t{0}), 1.0);
  EXPECT_DOUBLE_EQ(known_set_probability(cfg, std::uint64_t{1} << 1), 0.8);
}

TEST(EnumerateKnownSets, SampleRetainsDemographicSubsets) {
  // Income (0.005) and Disease (0.001) fall below epsilon on their own, so
  // exactly the 8 subsets of {Age, Gender, Race} survive.
  std::vector<KnownSet> sets = enumerate_known_sets(sample_config());
  std::vector<std::uint64_t> expected{0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(masks_of(sets), expected);
}

TEST(EnumerateKnownSets, EpsilonZeroKeepsFullPowerset) {
  std::vector<KnownSet> sets = enumerate_known_sets(sample_config(100.0, 0.0));
  EXPECT_EQ(sets.size(), 32u);
  for (std::size_t i = 0; i < sets.size(); ++i)
    EXPECT_EQ(sets[i].mask, i);  // canonical order is mask order
}

TEST(EnumerateKnownSets, CachedProbabilityMatchesDirectComputation) {
  RiskConfig cfg = sample_config(100.0, 0.0);
  for (const auto& ks : enumerate_known_sets(cfg))
    EXPECT_EQ(ks.pk, known_set_probability(cfg, ks.mask));
}

TEST(EnumerateKnownSets, StrictThresholdExcludesEqualProbability) {
  RiskConfig cfg = config_from_probs({0.4}, 0.4);
  std::vector<KnownSet> sets = enumerate_known_sets(cfg);
  EXPECT_EQ(masks_of(sets), std::vector<std::uint64_t>{0});  // only {}
}

TEST(BruteForceKnownSets, EpsilonOneRetainsNothing) {
  EXPECT_TRUE(brute_force_known_sets(sample_config(100.0, 1.0)).empty());
  EXPECT_TRUE(enumerate_known_sets(sample_config(100.0, 1.0)).empty());
}

TEST(BruteForceKnownSets, SingleAttribute) {
  RiskConfig cfg = config_from_probs({0.5}, 0.4);
  std::vector<KnownSet> sets = brute_force_known_sets(cfg);
  EXPECT_EQ(masks_of(sets), (std::vector<std::uint64_t>{0, 1}));
}

TEST(BruteForceKnownSets, GuardRejectsWideSchemas) {
  RiskConfig cfg = config_from_probs(std::vector<double>(21, 0.5), 0.01);
  try {
    brute_force_known_sets(cfg);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "brute force limited to m <= 20");
  }
}

TEST(BruteForceKnownSets, MatchesEnumerationOnSample) {
  RiskConfig cfg = sample_config();
  std::vector<KnownSet> brute = brute_force_known_sets(cfg);
  std::vector<KnownSet> pruned = enumerate_known_sets(cfg);
  EXPECT_EQ(masks_of(brute), masks_of(pruned));
}

// Wide-schema pattern: a few well-known attributes, two dozen obscure ones.
// Retained sets cannot touch the obscure attributes, so the count must match
// a brute-force run on a truncated schema that keeps all survivors.
TEST(EnumerateKnownSets, WideSchemaMatchesTruncatedBruteForce) {
  std::vector<double> probs{0.05, 0.8, 0.7};
  for (int j = 0; j < 24; ++j) probs.push_back(j % 2 == 0 ? 0.005 : 0.001);
  RiskConfig wide = config_from_probs(probs, 0.01);
  std::vector<KnownSet> sets = enumerate_known_sets(wide);

  RiskConfig truncated = config_from_probs(
      std::vector<double>(probs.begin(), probs.begin() + 14), 0.01);
  std::vector<KnownSet> oracle = brute_force_known_sets(truncated);

  EXPECT_EQ(sets.size(), oracle.size());
  EXPECT_EQ(sets.size(), 8u);
  EXPECT_EQ(masks_of(sets), masks_of(oracle));
}

TEST(EnumerateKnownSets, RandomizedOracleEquivalence) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t m = 1 + rng() % 10;
    std::vector<double> probs(m);
    for (auto& p : probs)
      p = unit(rng) < 0.5 ? unit(rng) : unit(rng) * 0.1;
    double epsilon;
    switch (rng() % 3) {
      case 0: epsilon = 0.0; break;
      case 1: epsilon = unit(rng) * 0.5; break;
      default: {
        // Hit the strict boundary: epsilon equal to some subset's product.
        std::uint64_t mask = rng() & ((std::uint64_t{1} << m) - 1);
        double pk = 1.0;
        for (std::size_t j = 0; j < m; ++j)
          if ((mask >> j) & 1u) pk *= probs[j];
        epsilon = pk < 1.0 ? pk : 0.5;
        break;
      }
    }
    RiskConfig cfg = config_from_probs(probs, epsilon);
    std::vector<KnownSet> pruned = enumerate_known_sets(cfg);
    std::vector<KnownSet> brute = brute_force_known_sets(cfg);
    ASSERT_EQ(masks_of(pruned), masks_of(brute)) << "m=" << m << " eps=" << epsilon;
    for (std::size_t i = 0; i < pruned.size(); ++i)
      ASSERT_EQ(pruned[i].pk, brute[i].pk);
  }
}

TEST(KnownSetProbability, MonotoneUnderSupersets) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t m = 1 + rng() % 12;
    std::vector<double> probs(m);
    for (auto& p : probs) p = unit(rng);
    RiskConfig cfg = config_from_probs(probs, 0.0);
    std::uint64_t limit = (std::uint64_t{1} << m) - 1;
    std::uint64_t sub = rng() & limit;
    std::uint64_t super = sub | (rng() & limit);
    EXPECT_GE(known_set_probability(cfg, sub), known_set_probability(cfg, super));
  }
}

TEST(EnumerateKnownSets, OutputIsDownwardClosed) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t m = 1 + rng() % 8;
    std::vector<double> probs(m);
    for (auto& p : probs) p = unit(rng);
    RiskConfig cfg = config_from_probs(probs, unit(rng) * 0.3);
    std::vector<KnownSet> sets = enumerate_known_sets(cfg);
    std::vector<bool> retained(std::size_t{1} << m, false);
    for (const auto& ks : sets) retained[ks.mask] = true;
    for (const auto& ks : sets) {
      // Remove one member at a time: every immediate subset must be present.
      for (std::size_t j = 0; j < m; ++j)
        if (ks.contains(j))
          EXPECT_TRUE(retained[ks.mask & ~(std::uint64_t{1} << j)]);
    }
    EXPECT_LE(sets.size(), std::size_t{1} << m);
  }
}

}  // namespace
}  // namespace microrisk
