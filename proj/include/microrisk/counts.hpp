#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "microrisk/enumerate.hpp"
#include "microrisk/errors.hpp"
#include "microrisk/model.hpp"

namespace microrisk {

// A projected value combination, packed as the little-endian byte image of
// the member attributes' value codes in ascending attribute order.
using TupleKey = std::string;

inline TupleKey project_key(const Dataset& dataset, std::size_t row,
                            std::uint64_t mask) {
  TupleKey key;
  key.reserve(4 * static_cast<std::size_t>(std::popcount(mask)));
  for (std::size_t j = 0; j < dataset.attribute_count(); ++j) {
    if (!((mask >> j) & 1u)) continue;
    std::uint32_t code = dataset.code(row, j);
    char bytes[4];
    std::memcpy(bytes, &code, 4);
    key.append(bytes, 4);
  }
  return key;
}

inline std::vector<std::uint32_t> unpack_tuple_key(const TupleKey& key) {
  std::vector<std::uint32_t> codes(key.size() / 4);
  for (std::size_t i = 0; i < codes.size(); ++i)
    std::memcpy(&codes[i], key.data() + 4 * i, 4);
  return codes;
}

// The record's cell tokens at the masked attributes, ascending by index.
inline std::vector<std::string_view> project(const Dataset& dataset,
                                             std::size_t row,
                                             std::uint64_t mask) {
  std::vector<std::string_view> tuple;
  for (std::size_t j = 0; j < dataset.attribute_count(); ++j)
    if ((mask >> j) & 1u) tuple.push_back(dataset.value(row, j));
  return tuple;
}

// Occurrence counts of every projected value combination for one known set.
// Invariants: counts sum to N, every count is at least 1, and the empty
// known set collapses to a single entry mapping the empty tuple to N.
struct CountTable {
  KnownSet known_set;
  std::unordered_map<TupleKey, std::uint32_t> counts;

  std::uint32_t count_for(const Dataset& dataset, std::size_t row) const {
    auto it = counts.find(project_key(dataset, row, known_set.mask));
    if (it == counts.end())
      throw DataError("projection missing from count table (table/dataset mismatch)");
    return it->second;
  }
};

inline CountTable build_count_table(const Dataset& dataset, const KnownSet& ks) {
  CountTable table{ks, {}};
  for (std::size_t row = 0; row < dataset.record_count(); ++row)
    ++table.counts[project_key(dataset, row, ks.mask)];
  return table;
}

// One table per known set, order preserved. Tables are independent, so they
// can be built on several threads.
inline std::vector<CountTable> build_all_count_tables(
    const Dataset& dataset, std::span<const KnownSet> sets, unsigned jobs = 1) {
  std::vector<CountTable> tables(sets.size());
  if (jobs <= 1 || sets.size() <= 1) {
    for (std::size_t i = 0; i < sets.size(); ++i)
      tables[i] = build_count_table(dataset, sets[i]);
    return tables;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < sets.size();
         i = next.fetch_add(1))
      tables[i] = build_count_table(dataset, sets[i]);
  };
  std::vector<std::thread> pool;
  unsigned spawn = std::min<std::size_t>(jobs, sets.size());
  pool.reserve(spawn);
  for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return tables;
}

}  // namespace microrisk
