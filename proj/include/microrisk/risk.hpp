#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "microrisk/counts.hpp"
#include "microrisk/enumerate.hpp"
#include "microrisk/model.hpp"

namespace microrisk {

// One term of a record's risk sum, kept for reporting which split drives
// the score.
struct Contribution {
  KnownSet known_set;
  double likelihood = 0.0;
  double consequence = 0.0;
  double term = 0.0;
};

struct RecordRisk {
  std::size_t record_index = 0;
  double risk = 0.0;
  std::vector<Contribution> top_contributions;  // largest terms, descending
};

// Identification likelihood of a record through one known set: the set's
// publicly-known probability divided by the size of the record's
// equivalence class under that set. Always in [0,1].
inline double likelihood(const Dataset& dataset, std::size_t row,
                         const CountTable& table) {
  return table.known_set.pk /
         static_cast<double>(table.count_for(dataset, row));
}

namespace detail {

// Consequence summed with a caller-supplied value-weight source so the
// cached and uncached paths share one arithmetic order.
template <typename WeightAt>
double consequence_sum(const RiskConfig& config, std::uint64_t known_mask,
                       std::size_t m, WeightAt&& weight_at) {
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if ((known_mask >> j) & 1u) continue;
    double aw = config.attributes[j].attr_weight;
    if (aw <= 0.0) continue;  // zero terms cannot change the sum
    total += aw * weight_at(j);
  }
  return total;
}

template <typename WeightAt>
RecordRisk record_risk_impl(const Dataset& dataset, std::size_t row,
                            std::span<const CountTable> retained,
                            const RiskConfig& config, std::size_t top_k,
                            WeightAt&& weight_at) {
  const std::size_t m = dataset.attribute_count();
  RecordRisk result;
  result.record_index = row;
  double total = 0.0;
  for (const CountTable& table : retained) {
    double like = likelihood(dataset, row, table);
    double cons = consequence_sum(config, table.known_set.mask, m, weight_at);
    double term = like * config.alpha * cons;
    total += term;
    if (top_k > 0) {
      auto& top = result.top_contributions;
      if (top.size() < top_k || term > top.back().term) {
        Contribution c{table.known_set, like, cons, term};
        auto pos = std::upper_bound(
            top.begin(), top.end(), term,
            [](double t, const Contribution& x) { return t > x.term; });
        top.insert(pos, c);
        if (top.size() > top_k) top.pop_back();
      }
    }
  }
  result.risk = total;
  return result;
}

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs != 0) return jobs;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Static contiguous chunks; each worker owns disjoint indices, so results
// land in dataset order no matter how threads are scheduled.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  if (jobs <= 1 || n < 2) {
    body(0, n);
    return;
  }
  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(jobs, n));
  std::size_t chunk = (n + workers - 1) / workers;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t begin = t * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Sensitivity consequence of one known/unknown split: the summed weighted
// sensitivity of the record's values on the unknown attributes. The full
// known set has an empty unknown set and consequence 0.
inline double consequence(const Dataset& dataset, std::size_t row,
                          const KnownSet& ks, const RiskConfig& config) {
  return detail::consequence_sum(
      config, ks.mask, dataset.attribute_count(), [&](std::size_t j) {
        return resolve_value_weight(config.attributes[j], dataset.value(row, j));
      });
}

// Total disclosure risk of one record over the retained known sets,
// accumulated in canonical (ascending mask) order.
inline RecordRisk record_risk(const Dataset& dataset, std::size_t row,
                              std::span<const CountTable> retained,
                              const RiskConfig& config,
                              std::size_t top_k = 10) {
  return detail::record_risk_impl(
      dataset, row, retained, config, top_k, [&](std::size_t j) {
        return resolve_value_weight(config.attributes[j], dataset.value(row, j));
      });
}

struct AssessOptions {
  unsigned jobs = 0;                    // 0 = available parallelism
  std::size_t top_contributions = 10;  // 0 disables contribution tracking
};

// Risk for every record against an already-enumerated list of known sets.
// Builds one count table per set, then evaluates records independently
// (and, when asked, concurrently); output order matches dataset order and
// is identical for any job count.
inline std::vector<RecordRisk> assess_with_sets(const Dataset& dataset,
                                                const RiskConfig& config,
                                                std::span<const KnownSet> sets,
                                                const AssessOptions& options = {}) {
  unsigned jobs = detail::resolve_jobs(options.jobs);
  std::vector<CountTable> tables = build_all_count_tables(dataset, sets, jobs);

  // Resolve each attribute's distinct values once; the hot loop then reads
  // weights by value code.
  const std::size_t m = dataset.attribute_count();
  std::vector<std::vector<double>> weight_of_code(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& attr = config.attributes[j];
    if (attr.attr_weight <= 0.0) continue;
    auto& column = weight_of_code[j];
    column.resize(dataset.distinct_count(j));
    for (std::uint32_t c = 0; c < column.size(); ++c)
      column[c] = resolve_value_weight(attr, dataset.token_for_code(j, c));
  }

  std::vector<RecordRisk> results(dataset.record_count());
  detail::parallel_for(
      dataset.record_count(), jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row)
          results[row] = detail::record_risk_impl(
              dataset, row, std::span<const CountTable>(tables), config,
              options.top_contributions, [&](std::size_t j) {
                return weight_of_code[j][dataset.code(row, j)];
              });
      });
  return results;
}

// Full pipeline: enumerate the surviving known sets for config.epsilon,
// count, and score every record.
inline std::vector<RecordRisk> assess_dataset(const Dataset& dataset,
                                              const RiskConfig& config,
                                              const AssessOptions& options = {}) {
  std::vector<KnownSet> sets = enumerate_known_sets(config);
  return assess_with_sets(dataset, config, sets, options);
}

}  // namespace microrisk
