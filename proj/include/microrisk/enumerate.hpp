#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "microrisk/errors.hpp"
#include "microrisk/model.hpp"

namespace microrisk {

// One known/unknown split: the adversary knows the attributes in the mask,
// everything else forms the unknown set. pk caches the product of the
// members' publicly-known probabilities (empty product = 1).
struct KnownSet {
  std::uint64_t mask = 0;
  double pk = 1.0;

  bool contains(std::size_t attr) const { return (mask >> attr) & 1u; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask)); }

  friend bool operator==(const KnownSet& a, const KnownSet& b) {
    return a.mask == b.mask;
  }
};

inline std::uint64_t mask_from_indices(std::span<const std::size_t> indices) {
  std::uint64_t mask = 0;
  for (auto i : indices) mask |= std::uint64_t{1} << i;
  return mask;
}

// Product of public_prob over the members, multiplied in ascending
// attribute order. The enumerators below accumulate their products in the
// same order, so retained/pruned decisions agree bit for bit.
inline double known_set_probability(const RiskConfig& config, std::uint64_t mask) {
  double p = 1.0;
  for (std::size_t j = 0; j < config.attributes.size(); ++j)
    if ((mask >> j) & 1u) p *= config.attributes[j].public_prob;
  return p;
}

inline double known_set_probability(const RiskConfig& config,
                                    std::span<const std::size_t> indices) {
  return known_set_probability(config, mask_from_indices(indices));
}

namespace detail {

inline void expand_known_sets(const std::vector<double>& probs, double epsilon,
                              std::uint64_t mask, double pk, std::size_t next,
                              std::vector<KnownSet>& out) {
  out.push_back({mask, pk});
  for (std::size_t j = next; j < probs.size(); ++j) {
    double extended = pk * probs[j];
    if (extended > epsilon)
      expand_known_sets(probs, epsilon, mask | (std::uint64_t{1} << j),
                        extended, j + 1, out);
    // An extension at or below epsilon kills the whole subtree: adding more
    // attributes can only shrink the product further.
  }
}

}  // namespace detail

// All subsets of attributes whose publicly-known probability strictly
// exceeds config.epsilon, sorted by bitmask value (attribute 0 = lowest
// bit). Depth-first expansion over higher-indexed attributes visits the
// subset tree once and never materializes a pruned subtree, so the cost is
// proportional to the retained sets, not 2^m.
inline std::vector<KnownSet> enumerate_known_sets(const RiskConfig& config) {
  if (config.attributes.size() > kMaxAttributes)
    throw DataError("more than 64 attributes are not supported");
  std::vector<double> probs;
  probs.reserve(config.attributes.size());
  for (const auto& a : config.attributes) probs.push_back(a.public_prob);

  std::vector<KnownSet> out;
  if (1.0 > config.epsilon)  // empty set survives whenever epsilon < 1
    detail::expand_known_sets(probs, config.epsilon, 0, 1.0, 0, out);
  std::sort(out.begin(), out.end(),
            [](const KnownSet& a, const KnownSet& b) { return a.mask < b.mask; });
  return out;
}

// Oracle for the pruning enumerator: filter all 2^m subsets directly.
// Guarded because the full powerset is intractable for wide schemas.
inline std::vector<KnownSet> brute_force_known_sets(const RiskConfig& config,
                                                    std::size_t guard = 20) {
  const std::size_t m = config.attributes.size();
  if (m > guard)
    throw DataError("brute force limited to m <= " + std::to_string(guard));
  std::vector<KnownSet> out;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double pk = known_set_probability(config, mask);
    if (pk > config.epsilon) out.push_back({mask, pk});
  }
  return out;
}

}  // namespace microrisk
