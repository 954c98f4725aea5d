#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microrisk/enumerate.hpp"
#include "microrisk/io.hpp"
#include "microrisk/model.hpp"
#include "microrisk/report.hpp"
#include "microrisk/risk.hpp"
#include "microrisk/version.hpp"

namespace microrisk {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

struct ComputeOptions {
  std::string data_path;
  std::string config_path;
  std::string out_path;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> threshold;
  std::string scores_path;  // empty = skip
  bool brute_force = false;
  unsigned jobs = 0;  // 0 = available parallelism
};

struct EnumerateOptions {
  std::string config_path;
  std::optional<double> epsilon;
};

struct HistogramOptions {
  std::string report_path;
  std::string format = "csv";
};

namespace detail {

inline void apply_overrides(RiskConfig& config, std::optional<double> epsilon,
                            std::optional<double> alpha,
                            std::optional<double> threshold) {
  if (epsilon) config.epsilon = *epsilon;
  if (alpha) config.alpha = *alpha;
  if (threshold) config.high_risk_threshold = *threshold;
}

inline std::string known_set_names(const RiskConfig& config, const KnownSet& ks) {
  std::string s = "{";
  bool first = true;
  for (std::size_t j = 0; j < config.attributes.size(); ++j) {
    if (!ks.contains(j)) continue;
    if (!first) s += ", ";
    s += config.attributes[j].name;
    first = false;
  }
  s += "}";
  return s;
}

}  // namespace detail

inline int cmd_compute(const ComputeOptions& opts) {
  RiskConfig config = load_config(opts.config_path);
  detail::apply_overrides(config, opts.epsilon, opts.alpha, opts.threshold);
  Dataset dataset = load_dataset(opts.data_path);

  ValidationResult validation = validate_config(dataset, config);
  if (!validation.ok()) {
    std::cerr << validation.to_string();
    return kExitValidation;
  }

  std::vector<KnownSet> sets = opts.brute_force
                                   ? brute_force_known_sets(config)
                                   : enumerate_known_sets(config);
  AssessOptions assess_opts;
  assess_opts.jobs = opts.jobs;
  assess_opts.top_contributions = 0;  // not exported by the report
  std::vector<RecordRisk> risks =
      assess_with_sets(dataset, config, sets, assess_opts);
  RiskReport report = build_report(risks, config, sets.size());

  write_file(opts.out_path, report_to_json(report, dataset.attribute_count()));
  if (!opts.scores_path.empty())
    write_file(opts.scores_path, scores_to_csv(risks));

  char percent[32];
  std::snprintf(percent, sizeof percent, "%.2f", report.high_risk_percent());
  std::cout << "retained known sets: " << sets.size() << "\n"
            << "high risk records: " << report.high_risk.size() << " / "
            << report.n_records << " (" << percent << "%)\n";
  return kExitOk;
}

inline int cmd_enumerate(const EnumerateOptions& opts) {
  RiskConfig config = load_config(opts.config_path);
  detail::apply_overrides(config, opts.epsilon, std::nullopt, std::nullopt);
  ValidationResult validation = validate_config(config);
  if (!validation.ok()) {
    std::cerr << validation.to_string();
    return kExitValidation;
  }
  std::vector<KnownSet> sets = enumerate_known_sets(config);
  for (const auto& ks : sets)
    std::cout << detail::known_set_names(config, ks) << " pk=" << fmt_double(ks.pk)
              << "\n";
  std::cout << "total: " << sets.size() << "\n";
  return kExitOk;
}

inline int cmd_histogram(const HistogramOptions& opts) {
  std::vector<HistogramBin> bins = load_report_histogram(opts.report_path);
  const char sep = opts.format == "tsv" ? '\t' : ',';
  std::cout << "bin_lower" << sep << "bin_upper" << sep << "count\n";
  for (const auto& b : bins)
    std::cout << fmt_double(b.lower) << sep << fmt_double(b.upper) << sep
              << b.count << "\n";
  return kExitOk;
}

// Full command-line front end; args excludes the program name. Returns the
// process exit code. Exposed as a function so tests can drive the exact
// code path the binary runs.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"Per-record disclosure risk assessment for tabular microdata"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  ComputeOptions compute;
  auto* compute_cmd = app.add_subcommand(
      "compute", "Assess a dataset and write the risk report");
  compute_cmd->add_option("--data", compute.data_path, "Input CSV (header row)")
      ->required();
  compute_cmd->add_option("--config", compute.config_path, "Risk config JSON")
      ->required();
  compute_cmd->add_option("--out", compute.out_path, "Output report JSON path")
      ->required();
  compute_cmd->add_option("--epsilon", compute.epsilon,
                          "Override the config pruning threshold");
  compute_cmd->add_option("--alpha", compute.alpha,
                          "Override the config consequence coefficient");
  compute_cmd->add_option("--threshold", compute.threshold,
                          "Override the config high-risk threshold");
  compute_cmd->add_option("--scores", compute.scores_path,
                          "Also write per-record scores CSV here");
  compute_cmd->add_flag("--brute-force", compute.brute_force,
                        "Enumerate known sets by filtering the full powerset");
  compute_cmd->add_option("--jobs", compute.jobs,
                          "Worker threads (default: available parallelism)");

  EnumerateOptions enumerate;
  auto* enumerate_cmd = app.add_subcommand(
      "enumerate", "List the known sets that survive pruning");
  enumerate_cmd->add_option("--config", enumerate.config_path, "Risk config JSON")
      ->required();
  enumerate_cmd->add_option("--epsilon", enumerate.epsilon,
                            "Override the config pruning threshold");

  HistogramOptions histogram;
  auto* histogram_cmd = app.add_subcommand(
      "histogram", "Print histogram rows from a written report");
  histogram_cmd->add_option("--report", histogram.report_path, "Report JSON path")
      ->required();
  histogram_cmd->add_option("--format", histogram.format, "csv or tsv")
      ->check(CLI::IsMember({"csv", "tsv"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (compute_cmd->parsed()) return cmd_compute(compute);
    if (enumerate_cmd->parsed()) return cmd_enumerate(enumerate);
    if (histogram_cmd->parsed()) return cmd_histogram(histogram);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace microrisk
