#include "microrisk/counts.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "test_support.hpp"

namespace microrisk {
namespace {

using testing::random_dataset;
using testing::sample_config;
using testing::sample_dataset;

constexpr std::uint64_t kDemographics = 0b00111;  // Age, Gender, Race

// Token-tuple view of a table, independent of dictionary code assignment.
std::map<std::vector<std::string>, std::uint32_t> as_token_counts(
    const Dataset& ds, const CountTable& table) {
  std::map<std::vector<std::string>, std::uint32_t> out;
  for (const auto& [key, count] : table.counts) {
    std::vector<std::string> tokens;
    auto codes = unpack_tuple_key(key);
    std::size_t slot = 0;
    for (std::size_t j = 0; j < ds.attribute_count(); ++j)
      if (table.known_set.contains(j))
        tokens.emplace_back(ds.token_for_code(j, codes[slot++]));
    out[tokens] = count;
  }
  return out;
}

TEST(Project, WorkedExamples) {
  Dataset ds = sample_dataset();
  auto tuple = project(ds, 3, kDemographics);
  ASSERT_EQ(tuple.size(), 3u);
  EXPECT_EQ(tuple[0], "34");
  EXPECT_EQ(tuple[1], "Male");
  EXPECT_EQ(tuple[2], "Black");
  EXPECT_TRUE(project(ds, 0, 0).empty());
  auto gender = project(ds, 1, std::uint64_t{1} << 1);
  ASSERT_EQ(gender.size(), 1u);
  EXPECT_EQ(gender[0], "Female");
}

TEST(TupleKey, PackUnpackRoundTrip) {
  Dataset ds = sample_dataset();
  TupleKey key = project_key(ds, 3, kDemographics);
  auto codes = unpack_tuple_key(key);
  ASSERT_EQ(codes.size(), 3u);
  EXPECT_EQ(codes[0], ds.code(3, 0));
  EXPECT_EQ(codes[1], ds.code(3, 1));
  EXPECT_EQ(codes[2], ds.code(3, 2));
  EXPECT_TRUE(project_key(ds, 0, 0).empty());
}

TEST(BuildCountTable, WorkedExamples) {
  Dataset ds = sample_dataset();
  RiskConfig cfg = sample_config();

  CountTable demo = build_count_table(ds, {kDemographics,
                                           known_set_probability(cfg, kDemographics)});
  EXPECT_EQ(demo.count_for(ds, 3), 2u);  // records 0 and 3 share (34, Male, Black)
  EXPECT_EQ(demo.count_for(ds, 0), 2u);
  EXPECT_EQ(demo.count_for(ds, 1), 1u);

  CountTable empty = build_count_table(ds, {0, 1.0});
  EXPECT_EQ(empty.counts.size(), 1u);
  EXPECT_EQ(empty.count_for(ds, 2), 5u);

  CountTable all = build_count_table(ds, {0b11111, 0.0});
  EXPECT_EQ(all.counts.size(), 5u);  // all rows distinct
  for (std::size_t row = 0; row < 5; ++row)
    EXPECT_EQ(all.count_for(ds, row), 1u);
}

TEST(BuildAllCountTables, PreservesOrderAndSumsToN) {
  Dataset ds = sample_dataset();
  std::vector<KnownSet> sets = enumerate_known_sets(sample_config());
  ASSERT_EQ(sets.size(), 8u);
  std::vector<CountTable> tables = build_all_count_tables(ds, sets);
  ASSERT_EQ(tables.size(), 8u);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    EXPECT_EQ(tables[i].known_set.mask, sets[i].mask);
    std::uint64_t total = 0;
    for (const auto& [key, count] : tables[i].counts) {
      EXPECT_GE(count, 1u);
      total += count;
    }
    EXPECT_EQ(total, ds.record_count());
  }

  EXPECT_TRUE(build_all_count_tables(ds, std::vector<KnownSet>{}).empty());

  std::vector<KnownSet> just_empty{{0, 1.0}};
  auto single = build_all_count_tables(ds, just_empty);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].counts.at(TupleKey{}), ds.record_count());
}

TEST(BuildAllCountTables, ParallelMatchesSequential) {
  std::mt19937 rng(3);
  Dataset ds = random_dataset(rng, 200, 6);
  RiskConfig cfg = testing::random_config_for(rng, ds, 0.0);
  std::vector<KnownSet> sets = enumerate_known_sets(cfg);
  auto seq = build_all_count_tables(ds, sets, 1);
  auto par = build_all_count_tables(ds, sets, 4);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i)
    EXPECT_EQ(seq[i].counts, par[i].counts);
}

TEST(CountTable, MismatchedDatasetThrows) {
  Dataset ds = sample_dataset();
  CountTable table = build_count_table(ds, {kDemographics, 0.168});
  Dataset other({"Age", "Gender", "Race", "Income", "Disease"},
                {{"99", "Male", "Martian", "1K", "Flu"}});
  EXPECT_THROW(table.count_for(other, 0), DataError);
}

TEST(CountTable, RandomizedSumAndMinInvariants) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    Dataset ds = random_dataset(rng, 1 + rng() % 120, 1 + rng() % 6);
    std::uint64_t limit = (std::uint64_t{1} << ds.attribute_count()) - 1;
    KnownSet ks{rng() & limit, 0.5};
    CountTable table = build_count_table(ds, ks);
    std::uint64_t total = 0;
    std::uint32_t smallest = ds.record_count() + 1;
    for (const auto& [key, count] : table.counts) {
      total += count;
      smallest = std::min(smallest, count);
    }
    EXPECT_EQ(total, ds.record_count());
    EXPECT_GE(smallest, 1u);
    for (std::size_t row = 0; row < ds.record_count(); ++row)
      EXPECT_GE(table.count_for(ds, row), 1u);
  }
}

// Adding attributes refines equivalence classes: counts never grow.
TEST(CountTable, RefinementMonotonicity) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    Dataset ds = random_dataset(rng, 1 + rng() % 100, 2 + rng() % 5);
    std::uint64_t limit = (std::uint64_t{1} << ds.attribute_count()) - 1;
    std::uint64_t sub = rng() & limit;
    std::uint64_t super = sub | (rng() & limit);
    CountTable coarse = build_count_table(ds, {sub, 0.0});
    CountTable fine = build_count_table(ds, {super, 0.0});
    for (std::size_t row = 0; row < ds.record_count(); ++row)
      EXPECT_LE(fine.count_for(ds, row), coarse.count_for(ds, row));
  }
}

TEST(CountTable, RowPermutationInvariance) {
  std::mt19937 rng(29);
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 40; ++i)
    rows.push_back({std::to_string(rng() % 3), std::to_string(rng() % 2),
                    std::to_string(rng() % 4)});
  Dataset original({"x", "y", "z"}, rows);
  std::shuffle(rows.begin(), rows.end(), rng);
  Dataset shuffled({"x", "y", "z"}, rows);

  for (std::uint64_t mask = 0; mask < 8; ++mask) {
    CountTable a = build_count_table(original, {mask, 0.0});
    CountTable b = build_count_table(shuffled, {mask, 0.0});
    EXPECT_EQ(as_token_counts(original, a), as_token_counts(shuffled, b));
  }
}

}  // namespace
}  // namespace microrisk
