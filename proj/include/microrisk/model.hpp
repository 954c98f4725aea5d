#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "microrisk/errors.hpp"

namespace microrisk {

// Attribute subsets are kept as 64-bit masks throughout the engine.
inline constexpr std::size_t kMaxAttributes = 64;

// Empty CSV cells are loaded as this reserved token. It takes part in
// equivalence-class counting like any other categorical value, and a config
// may assign it a sensitivity weight through the exact map or the default.
inline constexpr std::string_view kMissingToken = "";

// Immutable categorical table: N records by m attributes. Cell values are
// opaque tokens, dictionary-encoded per attribute so that counting and
// weight resolution work on small integer codes.
class Dataset {
 public:
  class Builder {
   public:
    explicit Builder(std::vector<std::string> schema) {
      ds_.schema_ = std::move(schema);
      ds_.m_ = ds_.schema_.size();
      if (ds_.m_ == 0) throw DataError("dataset has no attributes");
      if (ds_.m_ > kMaxAttributes)
        throw DataError("more than 64 attributes are not supported");
      for (const auto& name : ds_.schema_) {
        if (name.empty()) throw DataError("attribute name must be non-empty");
      }
      for (std::size_t i = 0; i < ds_.m_; ++i)
        for (std::size_t j = i + 1; j < ds_.m_; ++j)
          if (ds_.schema_[i] == ds_.schema_[j])
            throw DataError("duplicate attribute name: '" + ds_.schema_[i] + "'");
      ds_.dicts_.resize(ds_.m_);
      ds_.dict_maps_.resize(ds_.m_);
    }

    void add_record(std::span<const std::string_view> cells) {
      if (cells.size() != ds_.m_)
        throw DataError("record has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(ds_.m_));
      for (std::size_t j = 0; j < ds_.m_; ++j)
        ds_.codes_.push_back(ds_.intern(j, cells[j]));
      ++ds_.n_;
    }

    Dataset build() && {
      if (ds_.n_ == 0) throw DataError("empty dataset (no data rows)");
      ds_.codes_.shrink_to_fit();
      return std::move(ds_);
    }

   private:
    Dataset ds_;
  };

  Dataset(std::vector<std::string> schema,
          const std::vector<std::vector<std::string>>& records) {
    Builder b(std::move(schema));
    std::vector<std::string_view> views;
    for (const auto& rec : records) {
      views.assign(rec.begin(), rec.end());
      b.add_record(views);
    }
    *this = std::move(b).build();
  }

  std::size_t record_count() const { return n_; }     // N
  std::size_t attribute_count() const { return m_; }  // m
  const std::vector<std::string>& schema() const { return schema_; }

  std::string_view value(std::size_t row, std::size_t col) const {
    return dicts_[col][codes_[row * m_ + col]];
  }
  std::uint32_t code(std::size_t row, std::size_t col) const {
    return codes_[row * m_ + col];
  }
  std::size_t distinct_count(std::size_t col) const { return dicts_[col].size(); }
  std::string_view token_for_code(std::size_t col, std::uint32_t code) const {
    return dicts_[col][code];
  }
  std::optional<std::uint32_t> code_of(std::size_t col, std::string_view token) const {
    auto it = dict_maps_[col].find(std::string(token));
    if (it == dict_maps_[col].end()) return std::nullopt;
    return it->second;
  }

 private:
  Dataset() = default;

  std::uint32_t intern(std::size_t col, std::string_view token) {
    auto& map = dict_maps_[col];
    auto it = map.find(std::string(token));
    if (it != map.end()) return it->second;
    auto code = static_cast<std::uint32_t>(dicts_[col].size());
    dicts_[col].emplace_back(token);
    map.emplace(std::string(token), code);
    return code;
  }

  std::vector<std::string> schema_;
  std::vector<std::uint32_t> codes_;  // row-major, N * m
  std::vector<std::vector<std::string>> dicts_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> dict_maps_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
};

struct ValueRange {
  double lower = 0.0;
  double upper = 0.0;
  double weight = 0.0;
};

// Per-value sensitivity weights. Resolution order: exact token match, then
// the first range containing the token's numeric value, then the default.
struct ValueWeightMap {
  std::unordered_map<std::string, double> exact;
  std::vector<ValueRange> ranges;
  std::optional<double> default_weight;

  // Longest leading decimal number of the token, used for range matching.
  // Tokens like "50K" parse as 50; non-numeric tokens skip the ranges.
  static std::optional<double> numeric_prefix(std::string_view token) {
    std::string buf(token);
    const char* begin = buf.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v)) return std::nullopt;
    return v;
  }

  std::optional<double> find(std::string_view token) const {
    if (auto it = exact.find(std::string(token)); it != exact.end())
      return it->second;
    if (!ranges.empty()) {
      if (auto num = numeric_prefix(token)) {
        for (const auto& r : ranges)
          if (*num >= r.lower && *num <= r.upper) return r.weight;
      }
    }
    return default_weight;
  }
};

struct AttributeConfig {
  std::string name;
  double public_prob = 0.0;  // probability the attribute is publicly known
  double attr_weight = 0.0;  // attribute-level sensitivity weight
  ValueWeightMap value_weights;
};

struct RiskConfig {
  std::vector<AttributeConfig> attributes;  // aligned with the dataset schema
  double alpha = 100.0;                     // consequence coefficient, > 1
  double epsilon = 0.0;                     // pruning threshold
  double high_risk_threshold = 0.01;
};

struct Violation {
  std::string attribute;  // empty for config-wide rules
  std::string rule;
  std::string token;  // offending value, when relevant

  std::string to_string() const {
    std::string s;
    if (!attribute.empty()) s += attribute + ": ";
    s += rule;
    if (!token.empty()) s += " (value \"" + token + "\")";
    return s;
  }
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const {
    std::string s;
    for (const auto& v : violations) {
      s += v.to_string();
      s += '\n';
    }
    return s;
  }
};

namespace detail {

inline bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

inline void check_weight_map(const AttributeConfig& a,
                             std::vector<Violation>& out) {
  const auto& vw = a.value_weights;
  for (const auto& [token, w] : vw.exact)
    if (!in_unit_interval(w))
      out.push_back({a.name, "exact value weight must be in [0,1]", token});
  for (const auto& r : vw.ranges) {
    if (!(r.lower <= r.upper))
      out.push_back({a.name, "range lower bound must not exceed upper bound", ""});
    if (!in_unit_interval(r.weight))
      out.push_back({a.name, "range weight must be in [0,1]", ""});
  }
  // Interiors must not intersect; a shared endpoint is allowed and resolves
  // to the first listed range.
  for (std::size_t i = 0; i < vw.ranges.size(); ++i) {
    for (std::size_t j = i + 1; j < vw.ranges.size(); ++j) {
      const auto& a1 = vw.ranges[i];
      const auto& a2 = vw.ranges[j];
      if (std::max(a1.lower, a2.lower) < std::min(a1.upper, a2.upper))
        out.push_back({a.name, "value weight ranges overlap", ""});
    }
  }
  if (vw.default_weight && !in_unit_interval(*vw.default_weight))
    out.push_back({a.name, "default value weight must be in [0,1]", ""});
}

}  // namespace detail

// Config-only validation: parameter bounds and per-attribute rules that do
// not need the dataset.
inline ValidationResult validate_config(const RiskConfig& config) {
  std::vector<Violation> v;
  if (!(config.alpha > 1.0) || !std::isfinite(config.alpha))
    v.push_back({"", "alpha must exceed 1", ""});
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0))
    v.push_back({"", "epsilon must be in [0,1]", ""});
  if (!(config.high_risk_threshold >= 0.0) ||
      !std::isfinite(config.high_risk_threshold))
    v.push_back({"", "high_risk_threshold must be a finite value >= 0", ""});
  if (config.attributes.empty())
    v.push_back({"", "config must declare at least one attribute", ""});
  if (config.attributes.size() > kMaxAttributes)
    v.push_back({"", "more than 64 attributes are not supported", ""});
  for (const auto& a : config.attributes) {
    if (a.name.empty()) v.push_back({"", "attribute name must be non-empty", ""});
    if (!detail::in_unit_interval(a.public_prob))
      v.push_back({a.name, "public_prob must be in [0,1]", ""});
    if (!detail::in_unit_interval(a.attr_weight))
      v.push_back({a.name, "attr_weight must be in [0,1]", ""});
    detail::check_weight_map(a, v);
  }
  for (std::size_t i = 0; i < config.attributes.size(); ++i)
    for (std::size_t j = i + 1; j < config.attributes.size(); ++j)
      if (config.attributes[i].name == config.attributes[j].name)
        v.push_back({config.attributes[i].name,
                     "duplicate attribute in config", ""});
  return {std::move(v)};
}

// Full validation: config rules plus schema alignment plus resolvability of
// every dataset value of every sensitive attribute. Violations are data,
// not faults; nothing here throws.
inline ValidationResult validate_config(const Dataset& dataset,
                                        const RiskConfig& config) {
  ValidationResult result = validate_config(config);
  auto& v = result.violations;

  const auto& schema = dataset.schema();
  std::vector<bool> claimed(config.attributes.size(), false);
  bool all_found = true;
  bool in_order = schema.size() == config.attributes.size();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < config.attributes.size(); ++j) {
      if (config.attributes[j].name == schema[i]) {
        claimed[j] = true;
        found = true;
        if (i != j) in_order = false;
        break;
      }
    }
    if (!found) {
      v.push_back({schema[i], "attribute present in data but missing from config", ""});
      all_found = false;
    }
  }
  bool all_claimed = true;
  for (std::size_t j = 0; j < config.attributes.size(); ++j) {
    if (!claimed[j]) {
      v.push_back({config.attributes[j].name,
                   "config attribute not present in dataset", ""});
      all_claimed = false;
    }
  }
  if (all_found && all_claimed && !in_order)
    v.push_back({"", "config attribute order must match the dataset schema", ""});

  // Sensitive attributes must resolve a weight for every value they take.
  if (schema.size() == config.attributes.size()) {
    for (std::size_t j = 0; j < config.attributes.size(); ++j) {
      const auto& a = config.attributes[j];
      if (a.name != schema[j] || a.attr_weight <= 0.0) continue;
      for (std::uint32_t c = 0; c < dataset.distinct_count(j); ++c) {
        auto token = dataset.token_for_code(j, c);
        if (!a.value_weights.find(token))
          v.push_back({a.name, "value weight unresolvable", std::string(token)});
      }
    }
  }
  return result;
}

// Sensitivity weight of one cell value. Non-sensitive attributes
// (attr_weight == 0) resolve to 0; for sensitive attributes an unresolvable
// value means the config and data drifted apart after validation.
inline double resolve_value_weight(const AttributeConfig& config,
                                   std::string_view value) {
  if (config.attr_weight <= 0.0) return 0.0;
  if (auto w = config.value_weights.find(value)) return *w;
  throw DataError("no value weight for attribute '" + config.name +
                  "' value \"" + std::string(value) + "\"");
}

}  // namespace microrisk
