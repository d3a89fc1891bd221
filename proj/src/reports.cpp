#include "enkbf/reports.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace enkbf {

using nlohmann::json;

std::string format_value(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

namespace {

json config_json(const ExperimentConfig& config) {
  return json::parse(config.to_json_text());
}

}  // namespace

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = csv_line({"variant", "h", "seed", "sup_error",
                              "sup_error_stopped", "tau_n_hit", "tau_n_h_hit",
                              "tau_ref_hit", "blowup", "gain_violations",
                              "max_gain_ratio"});
  for (const ConvergenceRow& row : report.rows) {
    out += csv_line({variant_name(report.variant), format_value(row.h),
                     std::to_string(row.seed_index),
                     format_value(row.sup_error),
                     format_value(row.sup_error_stopped),
                     std::to_string(row.tau_n_hit ? 1 : 0),
                     std::to_string(row.tau_n_h_hit ? 1 : 0),
                     std::to_string(row.tau_ref_hit ? 1 : 0),
                     std::to_string(row.blowup ? 1 : 0),
                     std::to_string(row.gain_violations),
                     format_value(row.max_gain_ratio)});
  }
  return out;
}

std::string convergence_summary(const ConvergenceReport& report,
                                const ExperimentConfig& config,
                                double resolved_n, double resolved_mn) {
  json j;
  j["command"] = "converge";
  j["effective_config"] = config_json(config);
  j["resolved_thresholds"]["n"] = resolved_n;
  j["resolved_thresholds"]["m_n"] = resolved_mn;
  j["variant"] = variant_name(report.variant);
  j["seeds"] = report.seeds;
  j["master_seed"] = report.master_seed;
  j["h_values"] = report.h_values;
  j["mean_sup_stopped"] = report.mean_sup_stopped;
  j["mean_sup_unstopped"] = report.mean_sup_unstopped;
  j["tau_hits"] = report.tau_hits;
  j["blowups"] = report.blowups;
  j["max_gain_ratio"] = report.max_gain_ratio;
  j["slope"] = report.slope;
  j["intercept"] = report.intercept;
  j["slope_unstopped"] = report.slope_unstopped;
  j["gain_violations"] = report.total_gain_violations;
  return j.dump(2) + "\n";
}

std::string accuracy_csv(const AccuracyReport& report) {
  std::string out = csv_line(
      {"filter", "variant", "level", "initial_error", "seed", "sup_error",
       "blowup"});
  const char* filter =
      report.filter == FilterKind::Continuous ? "continuous" : "discrete";
  for (const AccuracyRow& row : report.rows) {
    out += csv_line({filter, variant_name(report.variant),
                     format_value(row.level), format_value(row.initial_error),
                     std::to_string(row.seed_index),
                     format_value(row.sup_error),
                     std::to_string(row.blowup ? 1 : 0)});
  }
  return out;
}

std::string accuracy_summary(const AccuracyReport& report,
                             const ExperimentConfig& config) {
  json j;
  j["command"] = "accuracy";
  j["effective_config"] = config_json(config);
  j["filter"] =
      report.filter == FilterKind::Continuous ? "continuous" : "discrete";
  j["variant"] = variant_name(report.variant);
  j["h"] = report.h;
  j["levels"] = report.levels;
  j["initial_errors"] = report.initial_errors;
  j["mean_sup"] = report.mean_sup;
  j["fit"]["slope"] = report.fit_slope;
  j["fit"]["intercept"] = report.fit_intercept;
  j["fit"]["r2"] = report.fit_r2;
  j["fit"]["residuals"] = report.fit_residuals;
  j["blowups"] = report.blowups;
  j["seeds"] = report.seeds;
  j["master_seed"] = report.master_seed;
  return j.dump(2) + "\n";
}

std::string wellposed_csv(const WellposedReport& report) {
  std::string out =
      csv_line({"filter", "variant", "n", "exceed_count", "seeds",
                "frequency"});
  const char* filter =
      report.filter == FilterKind::Continuous ? "continuous" : "discrete";
  for (std::size_t i = 0; i < report.n_list.size(); ++i) {
    out += csv_line({filter, variant_name(report.variant),
                     format_value(report.n_list[i]),
                     std::to_string(report.exceed_counts[i]),
                     std::to_string(report.seeds),
                     format_value(report.frequencies[i])});
  }
  return out;
}

std::string wellposed_summary(const WellposedReport& report,
                              const ExperimentConfig& config) {
  json j;
  j["command"] = "wellposed";
  j["effective_config"] = config_json(config);
  j["filter"] =
      report.filter == FilterKind::Continuous ? "continuous" : "discrete";
  j["variant"] = variant_name(report.variant);
  j["h"] = report.h;
  j["n_list"] = report.n_list;
  j["exceed_counts"] = report.exceed_counts;
  j["frequencies"] = report.frequencies;
  j["max_trace_quantiles"]["max"] = report.max_traces.empty()
                                         ? 0.0
                                         : *std::max_element(
                                               report.max_traces.begin(),
                                               report.max_traces.end());
  j["seeds"] = report.seeds;
  j["master_seed"] = report.master_seed;
  return j.dump(2) + "\n";
}

}  // namespace enkbf
