#include "enkbf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "enkbf/reports.hpp"
#include "enkbf/sweep.hpp"

namespace enkbf {

namespace {

FilteringProblem problem_from(const ExperimentConfig& config) {
  return builtin_problem(config.problem_name, config.problem_params);
}

Eigen::VectorXd resolve_x0(const ExperimentConfig& config,
                           const FilteringProblem& problem) {
  if (config.x0.empty()) {
    return Eigen::VectorXd::Constant(problem.d, 1.0);
  }
  if (config.x0.size() == 1) {
    return Eigen::VectorXd::Constant(problem.d, config.x0.front());
  }
  if (static_cast<int>(config.x0.size()) != problem.d) {
    throw ConfigError("config error at 'x0': expected 1 or " +
                      std::to_string(problem.d) + " entries");
  }
  return Eigen::Map<const Eigen::VectorXd>(config.x0.data(),
                                           config.x0.size());
}

StudySetup setup_from(const ExperimentConfig& config,
                      const FilteringProblem& problem) {
  StudySetup setup;
  setup.T = config.T;
  setup.h_fine = config.resolved_h_fine();
  setup.M = config.M;
  setup.x0 = resolve_x0(config, problem);
  setup.init_spread = config.init_spread;
  setup.threads = config.threads;
  return setup;
}

std::uint64_t pilot_seed(std::uint64_t master_seed, int index) {
  return mix64(master_seed ^ (0x9110700000ULL + index));
}

// m_n policy: ten times the 99th percentile of pilot reference errors of
// the matching continuous filter.
double resolve_mn(const ExperimentConfig& config,
                  const FilteringProblem& problem, const StudySetup& setup,
                  Variant variant) {
  if (config.threshold_mn) return *config.threshold_mn;
  const int pilots = std::min(config.seeds, 20);
  std::vector<double> sups(pilots, 0.0);
  run_indexed_tasks(pilots, setup.threads, [&](int s) {
    const BrownianLattice lattice(pilot_seed(config.master_seed, s), setup.T,
                                  setup.h_fine, setup.M, problem.d,
                                  problem.p);
    const ReferenceRun ref = generate_observations(
        problem, simulate_reference(problem, lattice, setup.x0), lattice);
    const Eigen::MatrixXd x0_members =
        initial_ensemble(problem, lattice, setup.x0, setup.init_spread);
    const ContinuousPath path = run_continuous_path(
        problem, lattice, ref, continuous_of(variant), x0_members,
        lattice.node_count(), Thresholds{});
    sups[s] = path.sup_accuracy;
  });
  std::sort(sups.begin(), sups.end());
  const int index =
      std::max(0, static_cast<int>(std::ceil(0.99 * pilots)) - 1);
  return 10.0 * sups[index];
}

double resolve_n(const ExperimentConfig& config,
                 const FilteringProblem& problem) {
  if (config.threshold_n) return *config.threshold_n;
  return default_trace_threshold(problem, config.T);
}

std::string out_path(const ExperimentConfig& config,
                     const std::string& file) {
  if (config.out_dir.empty()) return file;
  return config.out_dir + "/" + file;
}

}  // namespace

int cmd_converge(const ExperimentConfig& config, std::ostream& out) {
  const FilteringProblem problem = problem_from(config);
  StudySetup setup = setup_from(config, problem);
  const Variant variant = variant_from_name(config.variant);

  const double n = resolve_n(config, problem);
  const double mn = resolve_mn(config, problem, setup, variant);
  setup.thresholds = Thresholds{n, mn};

  const ConvergenceReport report = convergence_study(
      problem, variant, config.h_list, config.seeds, config.master_seed,
      setup);

  write_text_file(out_path(config, "converge.csv"), convergence_csv(report));
  write_text_file(out_path(config, "converge_summary.json"),
                  convergence_summary(report, config, n, mn));

  out << "converge " << variant_name(variant) << " on " << problem.name
      << ": slope=" << format_value(report.slope)
      << " gain_violations=" << report.total_gain_violations << "\n";
  return report.total_gain_violations == 0 ? 0 : 1;
}

int cmd_accuracy(const ExperimentConfig& config, std::ostream& out) {
  const FilteringProblem problem = problem_from(config);
  const StudySetup setup = setup_from(config, problem);
  const Variant variant = variant_from_name(config.variant);
  const FilterKind filter = config.filter == "continuous"
                                ? FilterKind::Continuous
                                : FilterKind::Discrete;
  const double h = config.h_list.front();

  const AccuracyReport report = accuracy_study(
      problem, filter, variant, h, config.error_levels,
      config.baseline_error, config.seeds, config.master_seed, setup);

  write_text_file(out_path(config, "accuracy.csv"), accuracy_csv(report));
  write_text_file(out_path(config, "accuracy_summary.json"),
                  accuracy_summary(report, config));

  out << "accuracy " << config.filter << "/" << variant_name(variant)
      << " on " << problem.name
      << ": slope=" << format_value(report.fit_slope)
      << " intercept=" << format_value(report.fit_intercept)
      << " r2=" << format_value(report.fit_r2)
      << " blowups=" << report.blowups << "\n";
  return 0;
}

int cmd_wellposed(const ExperimentConfig& config, std::ostream& out) {
  const FilteringProblem problem = problem_from(config);
  const StudySetup setup = setup_from(config, problem);
  const Variant variant = variant_from_name(config.variant);
  const FilterKind filter = config.filter == "continuous"
                                ? FilterKind::Continuous
                                : FilterKind::Discrete;
  const double h = config.h_list.front();

  std::vector<double> n_list = config.n_list;
  if (n_list.empty()) {
    const double n_star = default_trace_threshold(problem, config.T);
    if (!std::isfinite(n_star)) {
      throw ConfigError(
          "config error at 'n_list': the automatic ladder overflows for "
          "this problem; provide explicit thresholds");
    }
    n_list = {n_star / 64.0, n_star / 16.0, n_star / 4.0, n_star};
  }

  const WellposedReport report = stopping_probability_study(
      problem, filter, variant, h, n_list, config.seeds, config.master_seed,
      setup);

  write_text_file(out_path(config, "wellposed.csv"), wellposed_csv(report));
  write_text_file(out_path(config, "wellposed_summary.json"),
                  wellposed_summary(report, config));

  out << "wellposed " << config.filter << "/" << variant_name(variant)
      << " on " << problem.name << ": P[tau_n <= T] at n="
      << format_value(n_list.back()) << " is "
      << format_value(report.frequencies.back()) << "\n";
  return 0;
}

}  // namespace enkbf
