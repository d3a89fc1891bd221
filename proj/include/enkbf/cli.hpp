#pragma once

#include <iosfwd>

#include "enkbf/config.hpp"

namespace enkbf {

/// Options of the self-test suite. corrupt_h_placement deliberately drops
/// the h factor from the checked covariance identity so a mutated build of
/// the suite must fail; it exists for testing the suite itself.
struct SelftestOptions {
  bool corrupt_h_placement = false;
};

/// Continuous-time-limit experiment; writes converge.csv and
/// converge_summary.json under config.out_dir. Returns nonzero if any
/// invariant assertion fired during the runs.
int cmd_converge(const ExperimentConfig& config, std::ostream& out);

/// Accuracy-to-reference experiment; writes accuracy.csv and
/// accuracy_summary.json.
int cmd_accuracy(const ExperimentConfig& config, std::ostream& out);

/// Stopping-probability experiment; writes wellposed.csv and
/// wellposed_summary.json.
int cmd_wellposed(const ExperimentConfig& config, std::ostream& out);

/// Fixed-seed invariant suite; prints one line per check and returns the
/// number of failures.
int cmd_selftest(std::ostream& out, const SelftestOptions& options = {});

}  // namespace enkbf
