#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "enkbf/cli.hpp"
#include "enkbf/continuous_filters.hpp"
#include "enkbf/discrete_filters.hpp"
#include "enkbf/experiments.hpp"
#include "enkbf/kalman_oracle.hpp"
#include "enkbf/noise.hpp"
#include "enkbf/reference.hpp"

namespace enkbf {

namespace {

// Deterministic instance generator on top of the counter RNG.
class InstanceRng {
 public:
  explicit InstanceRng(std::uint64_t seed) : state_(mix64(seed)) {}

  double uniform() {
    state_ = mix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double normal() {
    const double u1 = std::max(uniform(), 0x1.0p-53);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1)) % (hi - lo + 1);
  }
  Eigen::MatrixXd matrix(int rows, int cols) {
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = normal();
    return a;
  }
  SymMatrix psd(int dim) {
    const Eigen::MatrixXd b = matrix(dim, dim);
    return SymMatrix(b * b.transpose());
  }
  SymMatrix pd(int dim) {
    const Eigen::MatrixXd b = matrix(dim, dim);
    return SymMatrix(b * b.transpose() +
                     0.5 * Eigen::MatrixXd::Identity(dim, dim));
  }

 private:
  std::uint64_t state_;
};

// Componentwise nonlinear observation: g_j(x) = sin(x_j) + 0.5 x_j for the
// first p coordinates; Lipschitz constant 1.5.
FilteringProblem random_nonlinear_problem(InstanceRng& rng, int d, int p) {
  return FilteringProblem::make(
      "selftest-nonlinear", d, p,
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; },
      [p](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd g(p);
        for (int j = 0; j < p; ++j) g(j) = std::sin(x(j)) + 0.5 * x(j);
        return g;
      },
      rng.pd(d), rng.pd(p), 1.0, 1.5, -1.0);
}

Ensemble random_ensemble(InstanceRng& rng, const FilteringProblem& problem,
                         int M, double scale = 1.0) {
  return Ensemble(scale * rng.matrix(problem.d, M), problem);
}

// Adaptive Simpson quadrature of phi(x) via the substitution t = u^2:
// phi(x) = 2/sqrt(pi) \int_0^inf e^{-u^2} (e^{-u^2 x} - 1 + u^2 x) du.
double phi_quadrature(double x) {
  const auto integrand = [x](double u) {
    const double v = u * u * x;
    return std::exp(-u * u) * (std::expm1(-v) + v);
  };
  std::function<double(double, double, double, double, double, int)> simpson =
      [&](double a, double b, double fa, double fb, double fm,
          int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = integrand(lm), frm = integrand(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth > 40 || std::abs(left + right - whole) < 1e-14) {
      return left + right;
    }
    return simpson(a, m, fa, fm, flm, depth + 1) +
           simpson(m, b, fm, fb, frm, depth + 1);
  };
  const double a = 0.0, b = 8.0;
  const double fa = integrand(a), fb = integrand(b),
               fm = integrand(0.5 * (a + b));
  return 2.0 / std::sqrt(3.14159265358979323846) *
         simpson(a, b, fa, fb, fm, 0);
}

struct CheckContext {
  std::ostream* out;
  int failures = 0;
  bool corrupt_h_placement = false;

  void check(const std::string& name, bool ok, const std::string& detail) {
    if (ok) {
      *out << "[ok]   " << name << "\n";
    } else {
      ++failures;
      *out << "[FAIL] " << name << ": " << detail << "\n";
    }
  }
};

void check_phi_quadrature(CheckContext& ctx) {
  double worst = 0.0;
  std::ostringstream detail;
  for (const double x : {0.05, 0.3, 1.0, 2.5, 3.9}) {
    const double closed = phi_scalar(x);
    const double quad = phi_quadrature(x);
    const double rel = std::abs(closed - quad) / std::abs(quad);
    if (rel > worst) {
      worst = rel;
      detail.str("");
      detail << "x=" << x << " closed=" << closed << " quad=" << quad;
    }
  }
  ctx.check("phi closed form vs quadrature (rel 1e-8)", worst <= 1e-8,
            detail.str());
}

void check_spectral_identity(CheckContext& ctx) {
  InstanceRng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = rng.uniform_int(1, 6);
    const SymMatrix s = rng.psd(dim);
    const double h = 0.5 * rng.uniform();
    const Eigen::MatrixXd lhs = inv_sqrt_shifted(s, h).mat();
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(dim, dim) -
                                0.5 * h * s.mat() +
                                phi_remainder(s, h).mat();
    worst = std::max(worst, (lhs - rhs).norm() / dim);
  }
  ctx.check("inv_sqrt_shifted = Id - h/2 s + phi(h s) (1e-10 dim)",
            worst <= 1e-10, "worst " + std::to_string(worst));
}

void check_covariance_identities(CheckContext& ctx) {
  InstanceRng rng(202);
  double worst_identity = 0.0, worst_agree = 0.0;
  std::string fingerprint;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.uniform_int(1, 6);
    const int p = rng.uniform_int(1, std::min(4, d));
    const int M = rng.uniform_int(2, 8);
    const double h = 0.25 * rng.uniform();
    const FilteringProblem problem = random_nonlinear_problem(rng, d, p);
    const Ensemble forecast = random_ensemble(rng, problem, M);

    const Eigen::MatrixXd K = gain_discrete(forecast, problem, h);
    const double m1 = M - 1;
    const Eigen::MatrixXd expected =
        forecast.covariance().mat() -
        (ctx.corrupt_h_placement ? 1.0 : h) / m1 * K *
            forecast.observed_anomalies() * forecast.anomalies().transpose();

    const Eigen::VectorXd dY = Eigen::VectorXd::Zero(p);
    const Ensemble etkf =
        esrf_analysis(problem, forecast, dY, h, EsrfVariant::Etkf);
    const Ensemble unpert =
        esrf_analysis(problem, forecast, dY, h, EsrfVariant::Unperturbed);

    const double scale = 1.0 + forecast.covariance().frobenius_norm();
    const double err_etkf =
        (etkf.covariance().mat() - expected).norm() / scale;
    const double err_unpert =
        (unpert.covariance().mat() - expected).norm() / scale;
    const double agree =
        (etkf.covariance().mat() - unpert.covariance().mat()).norm() / scale;
    if (std::max(err_etkf, err_unpert) > worst_identity) {
      worst_identity = std::max(err_etkf, err_unpert);
      fingerprint = "d=" + std::to_string(d) + " p=" + std::to_string(p) +
                    " M=" + std::to_string(M) + " trial=" +
                    std::to_string(trial);
    }
    worst_agree = std::max(worst_agree, agree);
  }
  ctx.check("ESRF covariance identity P^a = P^f - h/(M-1) K G E^T (1e-10)",
            worst_identity <= 1e-10,
            "worst " + std::to_string(worst_identity) + " at " + fingerprint);
  ctx.check("ETKF and unperturbed analysis covariances agree (1e-10)",
            worst_agree <= 1e-10, "worst " + std::to_string(worst_agree));
}

void check_adjointness(CheckContext& ctx) {
  InstanceRng rng(303);
  double worst = 0.0;
  std::string fingerprint;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.uniform_int(2, 6);
    const int M = rng.uniform_int(2, std::min(8, d + 1));
    const int p = rng.uniform_int(1, 4);
    const double h = 0.25 * rng.uniform();
    const FilteringProblem problem = random_nonlinear_problem(rng, d, p);
    const Ensemble forecast = random_ensemble(rng, problem, M);

    const Eigen::MatrixXd A = eakf_adjustment_matrix(forecast, problem, h);
    const SymMatrix S = transform_operator(forecast, problem);
    const Eigen::MatrixXd lhs = A * forecast.anomalies();
    const Eigen::MatrixXd rhs =
        forecast.anomalies() * inv_sqrt_shifted(S, h).mat();
    const double err = (lhs - rhs).norm();
    if (err > worst) {
      worst = err;
      fingerprint = "d=" + std::to_string(d) + " M=" + std::to_string(M) +
                    " p=" + std::to_string(p);
    }
  }
  ctx.check("adjustment/transform adjointness A E = E T (1e-9)",
            worst <= 1e-9, "worst " + std::to_string(worst) + " at " +
                               fingerprint);
}

void check_gain_bounds(CheckContext& ctx) {
  InstanceRng rng(404);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.uniform_int(1, 6);
    const int p = rng.uniform_int(1, std::min(4, d));
    const int M = rng.uniform_int(2, 8);
    const double h = 0.25 * rng.uniform();
    const FilteringProblem problem = random_nonlinear_problem(rng, d, p);
    const Ensemble forecast = random_ensemble(rng, problem, M, 2.0);

    const double kappa = problem.kappa_K();
    const double trPf = forecast.trace_cov();
    const GainSet gains = gain_set(forecast, problem, h);
    const double slack = 1.0 + 1e-9;
    if (spectral_norm(gains.K) > kappa * trPf * slack) ++violations;
    if (spectral_norm(gains.K_hat) > 0.5 * kappa * trPf * slack) ++violations;
    if (spectral_norm(gains.K_tilde) > 0.5 * kappa * trPf * slack) {
      ++violations;
    }
    if (spectral_norm(gain_continuous(forecast, problem)) >
        kappa * trPf * slack) {
      ++violations;
    }
  }
  ctx.check("gain estimates ||K|| <= kappa tr(P), hat/tilde <= half",
            violations == 0, std::to_string(violations) + " violations");
}

void check_anomaly_identity(CheckContext& ctx) {
  InstanceRng rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.uniform_int(1, 6);
    const int p = rng.uniform_int(1, std::min(4, d));
    const int M = rng.uniform_int(2, 8);
    const FilteringProblem problem = random_nonlinear_problem(rng, d, p);
    const Ensemble ens = random_ensemble(rng, problem, M);

    // G-tilde centers the observed members at g(xbar) instead of gbar.
    const Eigen::VectorXd g_mean = problem.observe(ens.mean());
    const Eigen::MatrixXd G_tilde = ens.observed().colwise() - g_mean;
    const double err = (ens.anomalies() * ens.observed_anomalies().transpose() -
                        ens.anomalies() * G_tilde.transpose())
                           .norm();
    worst = std::max(worst, err / (1.0 + ens.anomalies().norm()));
  }
  ctx.check("anomaly identity E G^T = E Gtilde^T (1e-10)", worst <= 1e-10,
            "worst " + std::to_string(worst));
}

void check_kalman_oracle(CheckContext& ctx) {
  // Stationary Riccati of the scalar model A=-1, G=Q=C=1.
  const FilteringProblem problem = builtin_problem("linear", {});
  KalmanBucyState state = KalmanBucyState::from_problem(
      problem, Eigen::VectorXd::Zero(1), SymMatrix::Identity(1));
  const double h = 1e-3;
  const Eigen::VectorXd dY = Eigen::VectorXd::Zero(1);
  for (int k = 0; k < 10000; ++k) {
    state = kalman_bucy_step(state, problem, dY, h);
  }
  const double stationary = std::sqrt(2.0) - 1.0;
  ctx.check("Kalman-Bucy stationary variance sqrt(2)-1 (1e-3)",
            std::abs(state.Sigma(0, 0) - stationary) <= 1e-3,
            "got " + std::to_string(state.Sigma(0, 0)));

  // Discrete covariance path approaches the continuous one as h -> 0.
  const auto sigma_gap = [&problem](double step) {
    KalmanBucyState cont = KalmanBucyState::from_problem(
        problem, Eigen::VectorXd::Zero(1), SymMatrix::Identity(1));
    KalmanBucyState disc = cont;
    const double h_fine = 1.0 / 4096.0;
    const int ratio = static_cast<int>(std::llround(step / h_fine));
    const Eigen::VectorXd dY = Eigen::VectorXd::Zero(1);
    double gap = 0.0;
    const int coarse_steps = static_cast<int>(std::llround(1.0 / step));
    for (int k = 1; k <= coarse_steps; ++k) {
      for (int j = 0; j < ratio; ++j) {
        cont = kalman_bucy_step(cont, problem, dY, h_fine);
      }
      disc = kalman_discrete_step(disc, problem, dY, step);
      gap = std::max(gap, std::abs(disc.Sigma(0, 0) - cont.Sigma(0, 0)));
    }
    return gap;
  };
  std::vector<double> lx, ly;
  for (const double step : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    lx.push_back(std::log2(step));
    ly.push_back(std::log2(sigma_gap(step)));
  }
  const LineFit fit = fit_line(lx, ly);
  ctx.check("discrete Kalman -> Kalman-Bucy consistency (slope >= 0.9)",
            fit.slope >= 0.9, "slope " + std::to_string(fit.slope));
}

void check_lattice(CheckContext& ctx) {
  const BrownianLattice a(42, 1.0, 1.0 / 64, 4, 2, 1);
  const BrownianLattice b(42, 1.0, 1.0 / 64, 4, 2, 1);
  bool identical = true;
  for (int node = 1; node <= 64 && identical; ++node) {
    identical = a.fine_increment(Channel::ModelMember, 1, node) ==
                b.fine_increment(Channel::ModelMember, 1, node);
  }
  ctx.check("lattice determinism", identical, "streams differ");

  bool exact = true;
  for (int k = 1; k <= 8 && exact; ++k) {
    Eigen::VectorXd manual = Eigen::VectorXd::Zero(2);
    for (int j = (k - 1) * 8 + 1; j <= k * 8; ++j) {
      manual += a.fine_increment(Channel::ModelMember, 2, j);
    }
    exact = manual == a.coarse_increment(Channel::ModelMember, 2, k, 8);
  }
  ctx.check("coarse aggregation is the exact fine sum", exact,
            "aggregation mismatch");
}

}  // namespace

int cmd_selftest(std::ostream& out, const SelftestOptions& options) {
  CheckContext ctx;
  ctx.out = &out;
  ctx.corrupt_h_placement = options.corrupt_h_placement;

  check_phi_quadrature(ctx);
  check_spectral_identity(ctx);
  check_covariance_identities(ctx);
  check_adjointness(ctx);
  check_gain_bounds(ctx);
  check_anomaly_identity(ctx);
  check_kalman_oracle(ctx);
  check_lattice(ctx);

  out << (ctx.failures == 0 ? "selftest: all checks passed\n"
                            : "selftest: " + std::to_string(ctx.failures) +
                                  " check(s) failed\n");
  return ctx.failures;
}

}  // namespace enkbf
