#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enkbf/errors.hpp"

namespace enkbf {

/// Experiment configuration, parsed from a JSON document. Unset fields take
/// the documented defaults; the effective (fully resolved) form is embedded
/// in every summary report.
struct ExperimentConfig {
  std::string problem_name = "ornstein-uhlenbeck";
  std::map<std::string, double> problem_params;

  std::string variant = "etkf";     // enkf | etkf | unperturbed
  std::string filter = "discrete";  // continuous | discrete

  double T = 1.0;
  std::vector<double> h_list;
  double h_fine = 0.0;  // 0: resolved to min(h_list) / fine_ratio
  int fine_ratio = 16;

  int M = 10;
  int seeds = 20;
  std::uint64_t master_seed = 1;

  std::vector<double> x0;  // resolved to d entries; scalar input broadcasts
  double init_spread = 1.0;

  std::optional<double> threshold_n;    // unset: auto
  std::optional<double> threshold_mn;   // unset: auto (pilot quantile)

  std::vector<double> error_levels = {0.0, 1.0, 4.0, 16.0};
  double baseline_error = 1.0;

  std::vector<double> n_list;  // wellposed ladder; empty: auto

  std::string out_dir = "reports";
  int threads = 0;

  /// Parses and validates; error messages name the offending field.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Serialized effective config (defaults resolved where static).
  std::string to_json_text() const;

  /// Validation shared by the commands; throws ConfigError.
  void validate() const;

  /// min(h_list)/fine_ratio when h_fine was not given.
  double resolved_h_fine() const;
};

}  // namespace enkbf
