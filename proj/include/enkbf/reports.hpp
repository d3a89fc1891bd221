#pragma once

#include <string>
#include <vector>

#include "enkbf/config.hpp"
#include "enkbf/experiments.hpp"

namespace enkbf {

/// Formats a double with 17 significant digits (value round-trips exactly).
std::string format_value(double v);

/// One CSV line from already-formatted cells.
std::string csv_line(const std::vector<std::string>& cells);

void write_text_file(const std::string& path, const std::string& content);

std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_summary(const ConvergenceReport& report,
                                const ExperimentConfig& config,
                                double resolved_n, double resolved_mn);

std::string accuracy_csv(const AccuracyReport& report);
std::string accuracy_summary(const AccuracyReport& report,
                             const ExperimentConfig& config);

std::string wellposed_csv(const WellposedReport& report);
std::string wellposed_summary(const WellposedReport& report,
                              const ExperimentConfig& config);

}  // namespace enkbf
