#include "enkbf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "enkbf/continuous_filters.hpp"
#include "enkbf/sweep.hpp"

namespace enkbf {

ContinuousKind continuous_of(Variant v) {
  return v == Variant::Enkf ? ContinuousKind::Enkbf : ContinuousKind::Etkbf;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Enkf:
      return "enkf";
    case Variant::Etkf:
      return "etkf";
    case Variant::Unperturbed:
      return "unperturbed";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "enkf") return Variant::Enkf;
  if (name == "etkf") return Variant::Etkf;
  if (name == "unperturbed") return Variant::Unperturbed;
  throw ConfigError("unknown filter variant '" + name +
                    "' (expected enkf | etkf | unperturbed)");
}

namespace {

// Relative slack absorbing round-off in the exact Lemma-style bounds.
constexpr double kBoundSlack = 1e-9;

bool violates(double norm, double bound) {
  return norm > bound * (1.0 + kBoundSlack);
}

double member_sq_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).squaredNorm();
}

}  // namespace

Eigen::MatrixXd initial_ensemble(const FilteringProblem& problem,
                                 const BrownianLattice& lattice,
                                 const Eigen::VectorXd& center,
                                 double spread) {
  Eigen::MatrixXd members(problem.d, lattice.ensemble_size());
  for (int i = 0; i < lattice.ensemble_size(); ++i) {
    members.col(i) =
        center + spread * lattice.standard_normal(Channel::InitDraw, i + 1, 0);
  }
  return members;
}

ContinuousPath run_continuous_path(const FilteringProblem& problem,
                                   const BrownianLattice& lattice,
                                   const ReferenceRun& ref,
                                   ContinuousKind kind,
                                   const Eigen::MatrixXd& x0_members,
                                   int record_stride,
                                   const Thresholds& thresholds) {
  const int n = lattice.node_count();
  if (record_stride < 1 || n % record_stride != 0) {
    throw Error("record stride must divide the fine node count");
  }
  const double h = lattice.h_fine();
  const double kappa = problem.kappa_K();

  ContinuousPath path;
  path.record_stride = record_stride;
  StoppingMonitor trace_monitor{thresholds.n};
  StoppingMonitor ref_monitor{thresholds.m_n};

  Ensemble ens(x0_members, problem);

  const auto record = [&](const Ensemble& e, const Eigen::MatrixXd& gain,
                          double acc_err) {
    path.members.push_back(e.members());
    path.gains.push_back(gain);
    path.trace_cov.push_back(e.trace_cov());
    path.accuracy_error.push_back(acc_err);
  };

  for (int j = 0; j <= n; ++j) {
    const double t = j * h;
    const Eigen::MatrixXd gain = gain_continuous(ens, problem);
    if (violates(spectral_norm(gain), kappa * ens.trace_cov())) {
      ++path.gain_violations;
    }
    const double acc_err =
        (ens.members().colwise() - ref.states.col(j)).squaredNorm();
    trace_monitor.observe(t, ens.trace_cov());
    ref_monitor.observe(t, acc_err);
    path.sup_accuracy = std::max(path.sup_accuracy, acc_err);
    path.max_trace = std::max(path.max_trace, ens.trace_cov());
    if (j % record_stride == 0) record(ens, gain, acc_err);
    if (j == n) break;

    const int node = j + 1;
    const Eigen::VectorXd dY = ref.obs_increments.col(node - 1);
    const Eigen::MatrixXd dW = lattice.fine_block(Channel::ModelMember, node);
    try {
      if (kind == ContinuousKind::Enkbf) {
        const Eigen::MatrixXd dV =
            lattice.fine_block(Channel::ObsMember, node);
        ens = enkbf_step(problem, ens, dY, dW, dV, h, gain);
      } else {
        ens = etkbf_step(problem, ens, dY, dW, h, gain);
      }
    } catch (const BlowUpError&) {
      path.blowup = true;
      path.blowup_time = node * h;
      break;
    }
  }

  path.tau_n = trace_monitor.first_hit;
  path.tau_ref = ref_monitor.first_hit;
  return path;
}

CoupledRunResult run_discrete_vs_path(const FilteringProblem& problem,
                                      const BrownianLattice& lattice,
                                      const ReferenceRun& ref,
                                      const ContinuousPath& path,
                                      const TimeGrid& grid, Variant variant,
                                      const Thresholds& thresholds) {
  if (grid.ratio % path.record_stride != 0) {
    throw Error("coarse step must be a multiple of the recorded stride");
  }
  const double h = grid.h;
  const int r = grid.ratio;
  const double kappa = problem.kappa_K();

  CoupledRunResult result;
  result.tau_n = path.tau_n;
  result.tau_ref = path.tau_ref;
  result.blowup = path.blowup;
  result.blowup_time = path.blowup_time;
  result.gain_violations = path.gain_violations;

  StoppingMonitor forecast_monitor{thresholds.n};

  const auto path_index = [&](int fine_node) {
    return fine_node / path.record_stride;
  };
  const auto path_has = [&](int fine_node) {
    return path_index(fine_node) < path.recorded_count();
  };

  Ensemble ens(path.members.front(), problem);

  // Node 0: identical initial ensembles, coupling error exactly zero.
  result.series.times.push_back(0.0);
  result.series.coupling_error.push_back(
      member_sq_distance(ens.members(), path.members.front()));
  result.series.accuracy_error.push_back(
      (ens.members().colwise() - ref.states.col(0).eval()).squaredNorm());

  for (int k = 1; k <= grid.coarse_steps; ++k) {
    const double t_k = grid.coarse_time(k);
    const int cell_start_fine = (k - 1) * r;
    if (!path_has(cell_start_fine)) break;  // continuous side blew up

    Ensemble forecast = [&]() -> Ensemble {
      const Eigen::MatrixXd Wk =
          lattice.coarse_block(Channel::ModelMember, k, r);
      return forecast_step(problem, ens, Wk, h);
    }();

    GainSet gains;
    Eigen::VectorXd dY;
    try {
      gains = gain_set(forecast, problem, h);
      dY = ref.coarse_obs_increment(k, r);

      const double trPf = forecast.trace_cov();
      if (violates(spectral_norm(gains.K), kappa * trPf) ||
          violates(spectral_norm(gains.K_hat), 0.5 * kappa * trPf) ||
          violates(spectral_norm(gains.K_tilde), 0.5 * kappa * trPf)) {
        ++result.gain_violations;
      }

      // Gain deviation sample at the cell start (the continuous gain and
      // ensemble are frozen there).
      const int idx = path_index(cell_start_fine);
      const Eigen::MatrixXd& K_cont = path.gains[idx];
      GainDiffSample sample;
      sample.time = grid.coarse_time(k - 1);
      sample.delta_full = spectral_norm(gains.K - K_cont);
      sample.delta_hat = spectral_norm(gains.K_hat - 0.5 * K_cont);
      sample.delta_cross =
          spectral_norm(gains.K - gains.K_hat - 0.5 * K_cont);
      const double trP = path.trace_cov[idx];
      const double drift_sq =
          member_sq_distance(forecast.members(), path.members[idx]);
      sample.bracket = h * trPf * trPf +
                       (std::sqrt(trPf) + std::sqrt(trP)) *
                           std::sqrt(drift_sq);
      result.gain_diffs.push_back(sample);

      forecast_monitor.observe(t_k, trPf);

      if (variant == Variant::Enkf) {
        const Eigen::MatrixXd Vk =
            lattice.coarse_block(Channel::ObsMember, k, r);
        ens = enkf_analysis(problem, forecast, dY, Vk, h);
      } else {
        ens = esrf_analysis(problem, forecast, dY, h,
                            variant == Variant::Etkf
                                ? EsrfVariant::Etkf
                                : EsrfVariant::Unperturbed);
      }
    } catch (const BlowUpError&) {
      result.blowup = true;
      result.blowup_time = std::min(result.blowup_time, t_k);
      break;
    }

    const int node_fine = k * r;
    if (!path_has(node_fine)) {
      result.blowup = true;
      break;
    }
    result.series.times.push_back(t_k);
    result.series.coupling_error.push_back(member_sq_distance(
        ens.members(), path.members[path_index(node_fine)]));
    result.series.accuracy_error.push_back(
        (ens.members().colwise() - ref.states.col(node_fine).eval())
            .squaredNorm());
  }

  result.tau_n_h = forecast_monitor.first_hit;

  const double stop =
      std::min({result.tau_n, result.tau_n_h, result.tau_ref});
  for (std::size_t i = 0; i < result.series.times.size(); ++i) {
    const double err = result.series.coupling_error[i];
    result.series.sup_coupling = std::max(result.series.sup_coupling, err);
    result.series.sup_accuracy =
        std::max(result.series.sup_accuracy, result.series.accuracy_error[i]);
    if (result.series.times[i] <= stop) {
      result.sup_coupling_stopped = std::max(result.sup_coupling_stopped, err);
    }
  }
  return result;
}

CoupledRunResult run_coupled_pair(const FilteringProblem& problem,
                                  const BrownianLattice& lattice,
                                  const TimeGrid& grid, Variant variant,
                                  const Eigen::MatrixXd& x0_members,
                                  const Eigen::VectorXd& x0_ref,
                                  const Thresholds& thresholds) {
  ReferenceRun ref = generate_observations(
      problem, simulate_reference(problem, lattice, x0_ref), lattice);
  const ContinuousPath path =
      run_continuous_path(problem, lattice, ref, continuous_of(variant),
                          x0_members, grid.ratio, thresholds);
  return run_discrete_vs_path(problem, lattice, ref, path, grid, variant,
                              thresholds);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("line fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error("line fit is degenerate (constant abscissa)");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double default_trace_threshold(const FilteringProblem& problem, double T) {
  const double n =
      8.0 * problem.Q.trace() * std::exp(2.0 * problem.lip_f * T);
  return std::isfinite(n) ? n : kNever;
}

namespace {

std::uint64_t lattice_seed(std::uint64_t master_seed, int seed_index) {
  return mix64(master_seed ^ (0x5eed0000ULL + seed_index));
}

void validate_h_list(const std::vector<double>& h_list, double T,
                     double h_fine) {
  if (h_list.empty()) throw ConfigError("h_list must not be empty");
  for (const double h : h_list) {
    TimeGrid::make(T, h, h_fine);  // throws on non-integer ratios
  }
}

}  // namespace

ConvergenceReport convergence_study(const FilteringProblem& problem,
                                    Variant variant,
                                    const std::vector<double>& h_list,
                                    int seeds, std::uint64_t master_seed,
                                    const StudySetup& setup) {
  validate_h_list(h_list, setup.T, setup.h_fine);
  if (h_list.size() < 4) {
    throw ConfigError("convergence study needs at least 4 step sizes");
  }
  if (seeds < 20) {
    throw ConfigError("convergence study needs at least 20 seeds");
  }

  std::vector<double> sorted_h = h_list;
  std::sort(sorted_h.begin(), sorted_h.end());
  const int record_stride = static_cast<int>(
      std::llround(sorted_h.front() / setup.h_fine));
  const int n_h = static_cast<int>(sorted_h.size());

  ConvergenceReport report;
  report.variant = variant;
  report.h_values = sorted_h;
  report.seeds = seeds;
  report.master_seed = master_seed;
  report.rows.resize(static_cast<std::size_t>(seeds) * n_h);

  std::vector<int> violations_per_seed(seeds, 0);

  run_indexed_tasks(seeds, setup.threads, [&](int s) {
    const BrownianLattice lattice(lattice_seed(master_seed, s), setup.T,
                                  setup.h_fine, setup.M, problem.d,
                                  problem.p);
    const ReferenceRun ref = generate_observations(
        problem, simulate_reference(problem, lattice, setup.x0), lattice);
    const Eigen::MatrixXd x0_members =
        initial_ensemble(problem, lattice, setup.x0, setup.init_spread);
    const ContinuousPath path = run_continuous_path(
        problem, lattice, ref, continuous_of(variant), x0_members,
        record_stride, setup.thresholds);

    int violations = path.gain_violations;
    for (int ih = 0; ih < n_h; ++ih) {
      const TimeGrid grid =
          TimeGrid::make(setup.T, sorted_h[ih], setup.h_fine);
      const CoupledRunResult run = run_discrete_vs_path(
          problem, lattice, ref, path, grid, variant, setup.thresholds);

      ConvergenceRow row;
      row.h = sorted_h[ih];
      row.seed_index = s;
      row.sup_error = run.series.sup_coupling;
      row.sup_error_stopped = run.sup_coupling_stopped;
      row.tau_n_hit = run.tau_n != kNever;
      row.tau_n_h_hit = run.tau_n_h != kNever;
      row.tau_ref_hit = run.tau_ref != kNever;
      row.blowup = run.blowup;
      row.gain_violations = run.gain_violations - path.gain_violations;
      row.max_gain_ratio =
          gain_difference_diagnostic({run}).max_ratio;
      report.rows[static_cast<std::size_t>(s) * n_h + ih] = row;
      violations += row.gain_violations;
    }
    violations_per_seed[s] = violations;
  });

  report.total_gain_violations =
      std::accumulate(violations_per_seed.begin(), violations_per_seed.end(),
                      0);

  report.mean_sup_stopped.assign(n_h, 0.0);
  report.mean_sup_unstopped.assign(n_h, 0.0);
  report.tau_hits.assign(n_h, 0);
  report.blowups.assign(n_h, 0);
  report.max_gain_ratio.assign(n_h, 0.0);
  std::vector<int> clean(n_h, 0);
  for (const ConvergenceRow& row : report.rows) {
    const int ih = static_cast<int>(
        std::lower_bound(sorted_h.begin(), sorted_h.end(), row.h) -
        sorted_h.begin());
    if (row.blowup) {
      ++report.blowups[ih];
      continue;
    }
    ++clean[ih];
    report.mean_sup_stopped[ih] += row.sup_error_stopped;
    report.mean_sup_unstopped[ih] += row.sup_error;
    if (row.tau_n_hit || row.tau_n_h_hit || row.tau_ref_hit) {
      ++report.tau_hits[ih];
    }
    report.max_gain_ratio[ih] =
        std::max(report.max_gain_ratio[ih], row.max_gain_ratio);
  }
  for (int ih = 0; ih < n_h; ++ih) {
    if (clean[ih] > 0) {
      report.mean_sup_stopped[ih] /= clean[ih];
      report.mean_sup_unstopped[ih] /= clean[ih];
    }
  }

  // Slope over the h values with no blow-ups and a positive mean.
  std::vector<double> lx, ly, lyu;
  for (int ih = 0; ih < n_h; ++ih) {
    if (report.blowups[ih] == 0 && report.mean_sup_stopped[ih] > 0.0) {
      lx.push_back(std::log2(sorted_h[ih]));
      ly.push_back(std::log2(report.mean_sup_stopped[ih]));
      lyu.push_back(std::log2(report.mean_sup_unstopped[ih]));
    }
  }
  if (lx.size() >= 2) {
    const LineFit fit = fit_line(lx, ly);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
    report.slope_unstopped = fit_line(lx, lyu).slope;
  }
  return report;
}

namespace {

// Offsets scaled so sum_i ||X0^ref - X0^(i)||^2 equals the target exactly.
Eigen::MatrixXd offset_ensemble(const FilteringProblem& problem,
                                const BrownianLattice& lattice,
                                const Eigen::VectorXd& center,
                                double target_error) {
  Eigen::MatrixXd offsets(problem.d, lattice.ensemble_size());
  for (int i = 0; i < lattice.ensemble_size(); ++i) {
    offsets.col(i) = lattice.standard_normal(Channel::InitDraw, i + 1, 0);
  }
  const double raw = offsets.squaredNorm();
  const double scale = target_error > 0.0 && raw > 0.0
                           ? std::sqrt(target_error / raw)
                           : 0.0;
  return (scale * offsets).colwise() + center;
}

struct SingleRun {
  double sup_accuracy = 0.0;
  double max_trace = 0.0;
  bool blowup = false;
};

SingleRun run_single_filter(const FilteringProblem& problem,
                            const BrownianLattice& lattice,
                            const ReferenceRun& ref, FilterKind filter,
                            Variant variant, double h,
                            const Eigen::MatrixXd& x0_members) {
  SingleRun out;
  if (filter == FilterKind::Continuous) {
    const ContinuousPath path = run_continuous_path(
        problem, lattice, ref, continuous_of(variant), x0_members,
        lattice.node_count(), Thresholds{});
    out.sup_accuracy = path.sup_accuracy;
    out.max_trace = path.max_trace;
    out.blowup = path.blowup;
    return out;
  }

  const TimeGrid grid = TimeGrid::make(lattice.horizon(), h,
                                       lattice.h_fine());
  Ensemble ens(x0_members, problem);
  out.sup_accuracy =
      (ens.members().colwise() - ref.states.col(0).eval()).squaredNorm();
  out.max_trace = 0.0;
  for (int k = 1; k <= grid.coarse_steps; ++k) {
    try {
      const Eigen::MatrixXd Wk =
          lattice.coarse_block(Channel::ModelMember, k, grid.ratio);
      const Ensemble forecast = forecast_step(problem, ens, Wk, h);
      out.max_trace = std::max(out.max_trace, forecast.trace_cov());
      const Eigen::VectorXd dY = ref.coarse_obs_increment(k, grid.ratio);
      if (variant == Variant::Enkf) {
        const Eigen::MatrixXd Vk =
            lattice.coarse_block(Channel::ObsMember, k, grid.ratio);
        ens = enkf_analysis(problem, forecast, dY, Vk, h);
      } else {
        ens = esrf_analysis(problem, forecast, dY, h,
                            variant == Variant::Etkf
                                ? EsrfVariant::Etkf
                                : EsrfVariant::Unperturbed);
      }
    } catch (const BlowUpError&) {
      out.blowup = true;
      break;
    }
    const double err = (ens.members().colwise() -
                        ref.states.col(k * grid.ratio).eval())
                           .squaredNorm();
    out.sup_accuracy = std::max(out.sup_accuracy, err);
  }
  return out;
}

}  // namespace

AccuracyReport accuracy_study(const FilteringProblem& problem,
                              FilterKind filter, Variant variant, double h,
                              const std::vector<double>& levels,
                              double baseline, int seeds,
                              std::uint64_t master_seed,
                              const StudySetup& setup) {
  if (levels.size() < 2) {
    throw ConfigError("accuracy study needs at least 2 error levels");
  }
  if (seeds < 1) throw ConfigError("accuracy study needs seeds >= 1");
  if (filter == FilterKind::Discrete) {
    TimeGrid::make(setup.T, h, setup.h_fine);
  }

  AccuracyReport report;
  report.filter = filter;
  report.variant = variant;
  report.h = filter == FilterKind::Discrete ? h : setup.h_fine;
  report.levels = levels;
  report.seeds = seeds;
  report.master_seed = master_seed;
  for (const double level : levels) {
    report.initial_errors.push_back(level * baseline);
  }

  const int n_levels = static_cast<int>(levels.size());
  report.rows.resize(static_cast<std::size_t>(seeds) * n_levels);

  run_indexed_tasks(seeds, setup.threads, [&](int s) {
    const BrownianLattice lattice(lattice_seed(master_seed, s), setup.T,
                                  setup.h_fine, setup.M, problem.d,
                                  problem.p);
    const ReferenceRun ref = generate_observations(
        problem, simulate_reference(problem, lattice, setup.x0), lattice);
    for (int il = 0; il < n_levels; ++il) {
      const double target = levels[il] * baseline;
      const Eigen::MatrixXd x0_members =
          offset_ensemble(problem, lattice, ref.states.col(0), target);
      const SingleRun run = run_single_filter(problem, lattice, ref, filter,
                                              variant, h, x0_members);
      AccuracyRow row;
      row.level = levels[il];
      row.initial_error = target;
      row.seed_index = s;
      row.sup_error = run.sup_accuracy;
      row.blowup = run.blowup;
      report.rows[static_cast<std::size_t>(s) * n_levels + il] = row;
    }
  });

  report.mean_sup.assign(n_levels, 0.0);
  std::vector<int> clean(n_levels, 0);
  for (const AccuracyRow& row : report.rows) {
    const int il = static_cast<int>(
        std::find(levels.begin(), levels.end(), row.level) - levels.begin());
    if (row.blowup) {
      ++report.blowups;
      continue;
    }
    ++clean[il];
    report.mean_sup[il] += row.sup_error;
  }
  for (int il = 0; il < n_levels; ++il) {
    if (clean[il] > 0) report.mean_sup[il] /= clean[il];
  }

  const LineFit fit = fit_line(report.initial_errors, report.mean_sup);
  report.fit_slope = fit.slope;
  report.fit_intercept = fit.intercept;
  report.fit_r2 = fit.r2;
  for (int il = 0; il < n_levels; ++il) {
    report.fit_residuals.push_back(
        report.mean_sup[il] -
        (fit.intercept + fit.slope * report.initial_errors[il]));
  }
  return report;
}

WellposedReport stopping_probability_study(const FilteringProblem& problem,
                                           FilterKind filter, Variant variant,
                                           double h,
                                           const std::vector<double>& n_list,
                                           int seeds,
                                           std::uint64_t master_seed,
                                           const StudySetup& setup) {
  if (n_list.empty()) throw ConfigError("wellposed study needs an n ladder");
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw ConfigError("n_list must be increasing");
  }
  if (seeds < 1) throw ConfigError("wellposed study needs seeds >= 1");

  WellposedReport report;
  report.filter = filter;
  report.variant = variant;
  report.h = filter == FilterKind::Discrete ? h : setup.h_fine;
  report.n_list = n_list;
  report.seeds = seeds;
  report.master_seed = master_seed;
  report.max_traces.assign(seeds, 0.0);

  run_indexed_tasks(seeds, setup.threads, [&](int s) {
    const BrownianLattice lattice(lattice_seed(master_seed, s), setup.T,
                                  setup.h_fine, setup.M, problem.d,
                                  problem.p);
    const ReferenceRun ref = generate_observations(
        problem, simulate_reference(problem, lattice, setup.x0), lattice);
    const Eigen::MatrixXd x0_members =
        initial_ensemble(problem, lattice, setup.x0, setup.init_spread);
    const SingleRun run = run_single_filter(problem, lattice, ref, filter,
                                            variant, h, x0_members);
    report.max_traces[s] = run.max_trace;
  });

  for (const double n : n_list) {
    const int count = static_cast<int>(
        std::count_if(report.max_traces.begin(), report.max_traces.end(),
                      [n](double m) { return m > n; }));
    report.exceed_counts.push_back(count);
    report.frequencies.push_back(static_cast<double>(count) / seeds);
  }
  return report;
}

GainDiffStats gain_difference_diagnostic(
    const std::vector<CoupledRunResult>& runs) {
  GainDiffStats stats;
  for (const CoupledRunResult& run : runs) {
    for (const GainDiffSample& sample : run.gain_diffs) {
      if (sample.bracket <= 0.0) {
        // 0/0 cells carry no information about the ratio bound.
        if (sample.delta_full > 0.0 || sample.delta_hat > 0.0 ||
            sample.delta_cross > 0.0) {
          throw Error("gain-difference bracket vanished with nonzero delta");
        }
        ++stats.skipped_degenerate;
        continue;
      }
      ++stats.samples;
      stats.max_ratio = std::max(stats.max_ratio, sample.max_ratio());
      stats.max_delta_full =
          std::max(stats.max_delta_full, sample.delta_full);
      stats.max_delta_hat = std::max(stats.max_delta_hat, sample.delta_hat);
      stats.max_delta_cross =
          std::max(stats.max_delta_cross, sample.delta_cross);
    }
  }
  return stats;
}

}  // namespace enkbf
