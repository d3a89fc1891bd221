#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "enkbf/diagnostics.hpp"
#include "enkbf/discrete_filters.hpp"
#include "enkbf/noise.hpp"
#include "enkbf/reference.hpp"

namespace enkbf {

/// Discrete filter variant. The matching continuous-time limit is the
/// EnKBF for Enkf and the ETKBF for both square-root variants.
enum class Variant { Enkf, Etkf, Unperturbed };
enum class ContinuousKind { Enkbf, Etkbf };
enum class FilterKind { Continuous, Discrete };

ContinuousKind continuous_of(Variant v);
const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Stopping thresholds: n bounds the covariance traces (tau_n for the
/// continuous filter, tau_n^h for the discrete forecast), m_n bounds the
/// reference error (tau_n^ref).
struct Thresholds {
  double n = kNever;
  double m_n = kNever;
};

/// Continuous filter trajectory on the fine grid with states recorded every
/// `record_stride` fine nodes, plus the monitors evaluated at every fine
/// node.
struct ContinuousPath {
  int record_stride = 1;
  std::vector<Eigen::MatrixXd> members;   // recorded nodes, incl. node 0
  std::vector<Eigen::MatrixXd> gains;     // continuous gain at those nodes
  std::vector<double> trace_cov;          // tr(P_t) at those nodes
  std::vector<double> accuracy_error;     // sum_i ||X^ref - X^(i)||^2
  double sup_accuracy = 0.0;
  double max_trace = 0.0;  // over every fine node, not just recorded ones
  double tau_n = kNever;
  double tau_ref = kNever;
  int gain_violations = 0;
  bool blowup = false;
  double blowup_time = kNever;

  int recorded_count() const { return static_cast<int>(members.size()); }
};

/// Result of one coupled discrete/continuous run at coarse step h.
struct CoupledRunResult {
  ErrorSeries series;
  double sup_coupling_stopped = 0.0;
  double tau_n = kNever;      // continuous trace threshold
  double tau_n_h = kNever;    // discrete forecast trace threshold
  double tau_ref = kNever;    // continuous reference-error threshold
  bool blowup = false;
  double blowup_time = kNever;
  int gain_violations = 0;
  std::vector<GainDiffSample> gain_diffs;
};

/// Members drawn as center + spread * unit normals from the lattice's
/// init channel.
Eigen::MatrixXd initial_ensemble(const FilteringProblem& problem,
                                 const BrownianLattice& lattice,
                                 const Eigen::VectorXd& center, double spread);

/// Advances the continuous filter over the whole fine grid against the
/// reference run's observations. Truncates on blow-up.
ContinuousPath run_continuous_path(const FilteringProblem& problem,
                                   const BrownianLattice& lattice,
                                   const ReferenceRun& ref,
                                   ContinuousKind kind,
                                   const Eigen::MatrixXd& x0_members,
                                   int record_stride,
                                   const Thresholds& thresholds);

/// Advances the discrete filter at step h = grid.ratio * h_fine against the
/// same lattice/observations and measures the coupling error against the
/// recorded continuous path at every coarse node.
CoupledRunResult run_discrete_vs_path(const FilteringProblem& problem,
                                      const BrownianLattice& lattice,
                                      const ReferenceRun& ref,
                                      const ContinuousPath& path,
                                      const TimeGrid& grid, Variant variant,
                                      const Thresholds& thresholds);

/// Convenience composition of the two runs above with identical initial
/// ensembles (zero initial discrepancy). x0_ref starts the reference
/// trajectory that synthesizes the observations.
CoupledRunResult run_coupled_pair(const FilteringProblem& problem,
                                  const BrownianLattice& lattice,
                                  const TimeGrid& grid, Variant variant,
                                  const Eigen::MatrixXd& x0_members,
                                  const Eigen::VectorXd& x0_ref,
                                  const Thresholds& thresholds);

struct StudySetup {
  double T = 1.0;
  double h_fine = 1.0 / 8192.0;
  int M = 10;
  Eigen::VectorXd x0;  // reference start and ensemble center
  double init_spread = 1.0;
  Thresholds thresholds;
  int threads = 0;
};

struct ConvergenceRow {
  double h = 0.0;
  int seed_index = 0;
  double sup_error = 0.0;
  double sup_error_stopped = 0.0;
  bool tau_n_hit = false;
  bool tau_n_h_hit = false;
  bool tau_ref_hit = false;
  bool blowup = false;
  int gain_violations = 0;
  double max_gain_ratio = 0.0;
};

struct ConvergenceReport {
  Variant variant = Variant::Enkf;
  std::vector<double> h_values;
  std::vector<double> mean_sup_stopped;    // per h, clean seeds
  std::vector<double> mean_sup_unstopped;  // per h
  std::vector<int> tau_hits;               // per h, any of the three
  std::vector<int> blowups;                // per h
  std::vector<double> max_gain_ratio;      // per h, over seeds and steps
  double slope = 0.0;       // log2-log2 OLS on mean_sup_stopped
  double intercept = 0.0;
  double slope_unstopped = 0.0;
  int seeds = 0;
  std::uint64_t master_seed = 0;
  int total_gain_violations = 0;
  std::vector<ConvergenceRow> rows;
};

/// The continuous-time-limit experiment: paired seeds (one lattice per seed
/// index shared by every h), mean sup coupling error per h, fitted log-log
/// slope. h_list entries must be integer multiples of setup.h_fine.
ConvergenceReport convergence_study(const FilteringProblem& problem,
                                    Variant variant,
                                    const std::vector<double>& h_list,
                                    int seeds, std::uint64_t master_seed,
                                    const StudySetup& setup);

struct AccuracyRow {
  double level = 0.0;
  double initial_error = 0.0;
  int seed_index = 0;
  double sup_error = 0.0;
  bool blowup = false;
};

struct AccuracyReport {
  FilterKind filter = FilterKind::Continuous;
  Variant variant = Variant::Enkf;
  double h = 0.0;  // discrete step (continuous runs use h_fine)
  std::vector<double> levels;
  std::vector<double> initial_errors;     // level * baseline
  std::vector<double> mean_sup;           // per level
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  double fit_r2 = 0.0;
  std::vector<double> fit_residuals;      // per level
  int blowups = 0;
  int seeds = 0;
  std::uint64_t master_seed = 0;
  std::vector<AccuracyRow> rows;
};

/// Accuracy-to-reference experiment: initial ensemble errors
/// level * baseline, measured E[sup_t sum_i ||X^ref - member||^2] per level
/// and its affine fit against the initial error.
AccuracyReport accuracy_study(const FilteringProblem& problem,
                              FilterKind filter, Variant variant, double h,
                              const std::vector<double>& levels,
                              double baseline, int seeds,
                              std::uint64_t master_seed,
                              const StudySetup& setup);

struct WellposedReport {
  FilterKind filter = FilterKind::Continuous;
  Variant variant = Variant::Enkf;
  double h = 0.0;
  std::vector<double> n_list;
  std::vector<int> exceed_counts;   // per n
  std::vector<double> frequencies;  // per n, exactly nonincreasing
  std::vector<double> max_traces;   // per seed
  int seeds = 0;
  std::uint64_t master_seed = 0;
};

/// Stopping-probability experiment: empirical P[tau_n <= T] for each
/// threshold in n_list, from the per-seed maxima of the covariance trace.
WellposedReport stopping_probability_study(const FilteringProblem& problem,
                                           FilterKind filter, Variant variant,
                                           double h,
                                           const std::vector<double>& n_list,
                                           int seeds,
                                           std::uint64_t master_seed,
                                           const StudySetup& setup);

struct GainDiffStats {
  double max_ratio = 0.0;
  double max_delta_full = 0.0;
  double max_delta_hat = 0.0;
  double max_delta_cross = 0.0;
  int samples = 0;
  int skipped_degenerate = 0;
};

/// Ratio statistics Delta_t / bracket over the recorded samples of one or
/// more coupled runs; degenerate cells (bracket == 0) are skipped.
GainDiffStats gain_difference_diagnostic(
    const std::vector<CoupledRunResult>& runs);

/// Ordinary least squares of y against x; r2 of the fit.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Default trace threshold 8 tr(Q) e^{2 lip_f T} (clamped to infinity on
/// overflow).
double default_trace_threshold(const FilteringProblem& problem, double T);

}  // namespace enkbf
