#pragma once

#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "microrisk/errors.hpp"
#include "microrisk/model.hpp"
#include "microrisk/report.hpp"
#include "microrisk/risk.hpp"
#include "microrisk/version.hpp"

namespace microrisk {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

// Doubles are serialized with 17 significant digits, enough to round-trip
// exactly; all report and scores output goes through here.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

struct CsvCursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
};

// One RFC-4180 field. Quoted fields are unescaped into scratch (stable
// addresses; views may point into it). Returns false at end of record.
inline std::string_view csv_field(CsvCursor& cur, std::deque<std::string>& scratch,
                                  std::size_t row_number) {
  if (!cur.done() && cur.peek() == '"') {
    ++cur.pos;
    std::string out;
    while (true) {
      if (cur.done())
        throw DataError("row " + std::to_string(row_number) +
                        ": unterminated quoted field");
      char c = cur.text[cur.pos++];
      if (c == '"') {
        if (!cur.done() && cur.peek() == '"') {
          out.push_back('"');
          ++cur.pos;
          continue;
        }
        break;
      }
      out.push_back(c);
    }
    if (!cur.done() && cur.peek() != ',' && cur.peek() != '\n' &&
        cur.peek() != '\r')
      throw DataError("row " + std::to_string(row_number) +
                      ": unexpected character after closing quote");
    scratch.push_back(std::move(out));
    return scratch.back();
  }
  std::size_t start = cur.pos;
  while (!cur.done() && cur.peek() != ',' && cur.peek() != '\n' &&
         cur.peek() != '\r')
    ++cur.pos;
  return cur.text.substr(start, cur.pos - start);
}

// Reads one record into fields; returns false when the input is exhausted.
inline bool csv_record(CsvCursor& cur, std::vector<std::string_view>& fields,
                       std::deque<std::string>& scratch, std::size_t row_number) {
  fields.clear();
  scratch.clear();
  if (cur.done()) return false;
  while (true) {
    fields.push_back(csv_field(cur, scratch, row_number));
    if (cur.done()) return true;
    char c = cur.peek();
    if (c == ',') {
      ++cur.pos;
      continue;
    }
    if (c == '\r') {
      ++cur.pos;
      if (!cur.done() && cur.peek() == '\n') ++cur.pos;
      return true;
    }
    if (c == '\n') {
      ++cur.pos;
      return true;
    }
  }
}

}  // namespace detail

// CSV → Dataset. First record is the header; empty cells become the missing
// marker; quoting, embedded separators/newlines, and CRLF line ends follow
// RFC 4180. Row numbers in errors count the header as row 1.
inline Dataset parse_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);  // UTF-8 BOM
  if (text.empty()) throw DataError("empty file");

  detail::CsvCursor cur{text};
  std::vector<std::string_view> fields;
  std::deque<std::string> scratch;

  if (!detail::csv_record(cur, fields, scratch, 1))
    throw DataError("empty file");
  std::vector<std::string> header(fields.begin(), fields.end());
  Dataset::Builder builder(std::move(header));
  const std::size_t m = fields.size();

  std::size_t row_number = 2;
  while (detail::csv_record(cur, fields, scratch, row_number)) {
    if (fields.size() != m)
      throw DataError("row " + std::to_string(row_number) + " has " +
                      std::to_string(fields.size()) + " cells, expected " +
                      std::to_string(m));
    builder.add_record(fields);
    ++row_number;
  }
  return std::move(builder).build();
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  return parse_csv(read_file(path));
}

namespace detail {

inline void require_keys(const nlohmann::json& obj,
                         std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed)
      if (key == a) known = true;
    if (!known)
      throw DataError("unknown key \"" + key + "\" in " + where);
  }
}

inline double number_at(const nlohmann::json& obj, const char* key,
                        const std::string& where) {
  if (!obj.contains(key))
    throw DataError(where + " is missing \"" + std::string(key) + "\"");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw DataError(where + " key \"" + std::string(key) + "\" must be a number");
  return v.get<double>();
}

}  // namespace detail

// Config JSON → RiskConfig. Structure errors throw DataError; semantic
// bounds are left to validate_config so that violations come back as a
// complete list rather than one at a time.
inline RiskConfig parse_config_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DataError("config must be a JSON object");
  detail::require_keys(root, {"alpha", "epsilon", "high_risk_threshold", "attributes"},
                       "config");

  RiskConfig config;
  config.alpha = detail::number_at(root, "alpha", "config");
  config.epsilon = detail::number_at(root, "epsilon", "config");
  if (root.contains("high_risk_threshold"))
    config.high_risk_threshold =
        detail::number_at(root, "high_risk_threshold", "config");

  if (!root.contains("attributes") || !root.at("attributes").is_array())
    throw DataError("config must contain an \"attributes\" array");
  for (const auto& item : root.at("attributes")) {
    if (!item.is_object())
      throw DataError("each attribute config must be a JSON object");
    detail::require_keys(item, {"name", "public_prob", "attr_weight", "values"},
                         "attribute config");
    AttributeConfig attr;
    if (!item.contains("name") || !item.at("name").is_string())
      throw DataError("attribute config requires a string \"name\"");
    attr.name = item.at("name").get<std::string>();
    const std::string where = "attribute \"" + attr.name + "\"";
    attr.public_prob = detail::number_at(item, "public_prob", where);
    attr.attr_weight = detail::number_at(item, "attr_weight", where);
    if (item.contains("values")) {
      const auto& values = item.at("values");
      if (!values.is_object())
        throw DataError(where + " \"values\" must be an object");
      detail::require_keys(values, {"exact", "ranges", "default"}, where + " values");
      if (values.contains("exact")) {
        const auto& exact = values.at("exact");
        if (!exact.is_object())
          throw DataError(where + " \"exact\" must map tokens to weights");
        for (const auto& [token, w] : exact.items()) {
          if (!w.is_number())
            throw DataError(where + " exact weight for \"" + token +
                            "\" must be a number");
          attr.value_weights.exact[token] = w.get<double>();
        }
      }
      if (values.contains("ranges")) {
        const auto& ranges = values.at("ranges");
        if (!ranges.is_array())
          throw DataError(where + " \"ranges\" must be an array");
        for (const auto& r : ranges) {
          if (!r.is_object())
            throw DataError(where + " each range must be an object");
          detail::require_keys(r, {"min", "max", "weight"}, where + " range");
          attr.value_weights.ranges.push_back(
              {detail::number_at(r, "min", where + " range"),
               detail::number_at(r, "max", where + " range"),
               detail::number_at(r, "weight", where + " range")});
        }
      }
      if (values.contains("default"))
        attr.value_weights.default_weight =
            detail::number_at(values, "default", where);
    }
    config.attributes.push_back(std::move(attr));
  }
  return config;
}

inline RiskConfig load_config(const std::filesystem::path& path) {
  return parse_config_json(read_file(path));
}

namespace detail {

inline void json_escape_to(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
}

}  // namespace detail

// Report JSON with fixed key order and fixed float formatting: two runs on
// identical inputs produce identical bytes.
inline std::string report_to_json(const RiskReport& report,
                                  std::size_t n_attributes) {
  std::string out;
  out.reserve(1024 + 64 * report.high_risk.size());
  auto kv_num = [&](const char* key, double v, bool comma = true) {
    out += "  \"";
    out += key;
    out += "\": ";
    out += fmt_double(v);
    out += comma ? ",\n" : "\n";
  };
  auto kv_int = [&](const char* key, std::uint64_t v) {
    out += "  \"";
    out += key;
    out += "\": ";
    out += std::to_string(v);
    out += ",\n";
  };
  out += "{\n";
  out += "  \"tool\": \"";
  out += kToolName;
  out += "\",\n  \"version\": \"";
  out += kToolVersion;
  out += "\",\n";
  kv_int("n_records", report.n_records);
  kv_int("n_attributes", n_attributes);
  kv_num("alpha", report.alpha);
  kv_num("epsilon", report.epsilon);
  kv_num("high_risk_threshold", report.high_risk_threshold);
  kv_int("retained_set_count", report.retained_set_count);
  out += "  \"notes\": {\n"
         "    \"empty_known_set_included\": true,\n"
         "    \"high_risk_rule\": \"risk > high_risk_threshold (strict)\",\n"
         "    \"histogram_binning\": \"decade bins with a dedicated zero bin\"\n"
         "  },\n";
  out += "  \"summary\": {\n";
  out += "    \"min\": " + fmt_double(report.summary.min) + ",\n";
  out += "    \"max\": " + fmt_double(report.summary.max) + ",\n";
  out += "    \"mean\": " + fmt_double(report.summary.mean) + ",\n";
  out += "    \"median\": " + fmt_double(report.summary.median) + "\n";
  out += "  },\n";
  kv_int("high_risk_count", report.high_risk.size());
  kv_num("high_risk_percent", report.high_risk_percent());
  out += "  \"histogram\": [\n";
  for (std::size_t i = 0; i < report.histogram.size(); ++i) {
    const auto& bin = report.histogram[i];
    out += "    {\"lower\": " + fmt_double(bin.lower) +
           ", \"upper\": " + fmt_double(bin.upper) +
           ", \"count\": " + std::to_string(bin.count) + "}";
    out += i + 1 < report.histogram.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"high_risk\": [\n";
  for (std::size_t i = 0; i < report.high_risk.size(); ++i) {
    const auto& e = report.high_risk[i];
    out += "    {\"record\": " + std::to_string(e.record_index) +
           ", \"risk\": " + fmt_double(e.risk) + "}";
    out += i + 1 < report.high_risk.size() ? ",\n" : "\n";
  }
  out += "  ]\n";
  out += "}\n";
  return out;
}

// Optional per-record export: one row per record in dataset order.
inline std::string scores_to_csv(std::span<const RecordRisk> risks) {
  std::string out = "record_index,risk\n";
  for (const auto& r : risks) {
    out += std::to_string(r.record_index);
    out += ',';
    out += fmt_double(r.risk);
    out += '\n';
  }
  return out;
}

// Histogram slice of a previously written report. Any failure — missing
// file, bad JSON, wrong shape — surfaces as IoError.
inline std::vector<HistogramBin> load_report_histogram(
    const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError&) {
    throw;
  }
  try {
    auto root = nlohmann::json::parse(text);
    std::vector<HistogramBin> bins;
    for (const auto& b : root.at("histogram")) {
      bins.push_back({b.at("lower").get<double>(), b.at("upper").get<double>(),
                      b.at("count").get<std::uint64_t>()});
    }
    return bins;
  } catch (const std::exception& e) {
    throw IoError("invalid report " + path.string() + ": " + e.what());
  }
}

}  // namespace microrisk
