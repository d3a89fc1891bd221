#include "enkbf/problem.hpp"

#include <cmath>
#include <set>

#include "enkbf/noise.hpp"

namespace enkbf {

double FilteringProblem::kappa_K() const {
  // ||C^{-1}|| is the spectral norm, 1 / lambda_min(C).
  const SpectralDecomposition dec = sym_eigen(C);
  const double lambda_min = dec.eigenvalues(dec.eigenvalues.size() - 1);
  return lip_g / lambda_min;
}

FilteringProblem FilteringProblem::make(std::string name, int d, int p,
                                        VectorField drift,
                                        VectorField observe, SymMatrix Q,
                                        SymMatrix C, double lip_f,
                                        double lip_g, double onesided_f) {
  FilteringProblem prob;
  prob.name = std::move(name);
  prob.d = d;
  prob.p = p;
  prob.drift = std::move(drift);
  prob.observe = std::move(observe);
  prob.Q = std::move(Q);
  prob.C = std::move(C);
  prob.lip_f = lip_f;
  prob.lip_g = lip_g;
  prob.onesided_f = onesided_f;

  if (prob.Q.dim() != d || prob.C.dim() != p) {
    throw Error("noise covariance dimensions do not match problem dims");
  }
  const auto min_eig = [](const SymMatrix& a) {
    const SpectralDecomposition dec = sym_eigen(a);
    return dec.eigenvalues(dec.eigenvalues.size() - 1);
  };
  if (min_eig(prob.Q) <= 0.0) throw NotPsdError("Q must be positive definite");
  if (min_eig(prob.C) <= 0.0) throw NotPsdError("C must be positive definite");

  prob.sqrt_Q = sqrt_psd(prob.Q).mat();
  prob.sqrt_C = sqrt_psd(prob.C).mat();
  prob.inv_C = prob.C.mat().ldlt().solve(
      Eigen::MatrixXd::Identity(p, p));
  return prob;
}

Eigen::MatrixXd FilteringProblem::observe_columns(
    const Eigen::MatrixXd& states) const {
  Eigen::MatrixXd out(p, states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    out.col(i) = observe(states.col(i));
  }
  return out;
}

Eigen::MatrixXd FilteringProblem::drift_columns(
    const Eigen::MatrixXd& states) const {
  Eigen::MatrixXd out(d, states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) {
    out.col(i) = drift(states.col(i));
  }
  return out;
}

void check_lipschitz_declarations(const FilteringProblem& problem,
                                  std::uint64_t seed, int pairs) {
  // Uniform points in the test box from the counter RNG, so the check is
  // deterministic.
  std::uint64_t k = mix64(seed ^ 0x4c69707363686974ULL);
  const auto uniform = [&k]() {
    k = mix64(k);
    return 2.0 * (static_cast<double>(k >> 11) * 0x1.0p-53) - 1.0;
  };
  const double r = problem.test_box_radius;
  for (int n = 0; n < pairs; ++n) {
    Eigen::VectorXd x(problem.d), y(problem.d);
    for (int j = 0; j < problem.d; ++j) {
      x(j) = r * uniform();
      y(j) = r * uniform();
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double df = (problem.drift(x) - problem.drift(y)).norm();
    const double dg = (problem.observe(x) - problem.observe(y)).norm();
    // Tiny slack for round-off at the declared constant.
    if (df > problem.lip_f * dist * (1.0 + 1e-12)) {
      throw Error("declared lip_f=" + std::to_string(problem.lip_f) +
                  " violated on sampled pair (ratio " +
                  std::to_string(df / dist) + ")");
    }
    if (dg > problem.lip_g * dist * (1.0 + 1e-12)) {
      throw Error("declared lip_g=" + std::to_string(problem.lip_g) +
                  " violated on sampled pair (ratio " +
                  std::to_string(dg / dist) + ")");
    }
  }
}

namespace {

double get_param(const std::map<std::string, double>& params,
                 const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    const std::set<std::string>& known) {
  for (const auto& [key, value] : params) {
    if (!known.contains(key)) {
      throw Error("unknown problem parameter '" + key + "'");
    }
  }
}

FilteringProblem make_linear(const std::map<std::string, double>& params) {
  reject_unknown(params, {"a", "gscale", "q", "c", "d"});
  const int d = static_cast<int>(get_param(params, "d", 1));
  const double a = get_param(params, "a", -1.0);
  const double gscale = get_param(params, "gscale", 1.0);
  const double q = get_param(params, "q", 1.0);
  const double c = get_param(params, "c", 1.0);
  if (d < 1) throw Error("linear problem needs d >= 1");

  const Eigen::MatrixXd A = a * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd G = gscale * Eigen::MatrixXd::Identity(d, d);
  auto prob = FilteringProblem::make(
      "linear", d, d,
      [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; },
      [gscale](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return gscale * x;
      },
      SymMatrix(q * Eigen::MatrixXd::Identity(d, d)),
      SymMatrix(c * Eigen::MatrixXd::Identity(d, d)), std::abs(a),
      std::abs(gscale), a);
  prob.linear_A = A;
  prob.linear_G = G;
  return prob;
}

FilteringProblem make_ou(const std::map<std::string, double>& params) {
  reject_unknown(params, {"theta", "q", "c", "d"});
  const int d = static_cast<int>(get_param(params, "d", 1));
  const double theta = get_param(params, "theta", 1.0);
  const double q = get_param(params, "q", 1.0);
  const double c = get_param(params, "c", 1.0);
  if (d < 1) throw Error("ornstein-uhlenbeck problem needs d >= 1");
  if (theta <= 0.0) throw Error("ornstein-uhlenbeck needs theta > 0");

  auto prob = FilteringProblem::make(
      "ornstein-uhlenbeck", d, d,
      [theta](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return -theta * x;
      },
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; },
      SymMatrix(q * Eigen::MatrixXd::Identity(d, d)),
      SymMatrix(c * Eigen::MatrixXd::Identity(d, d)), theta, 1.0, -theta);
  prob.linear_A = -theta * Eigen::MatrixXd::Identity(d, d);
  prob.linear_G = Eigen::MatrixXd::Identity(d, d);
  return prob;
}

Eigen::Vector3d lorenz63(double sigma, double rho, double beta,
                         const Eigen::Vector3d& u) {
  return {sigma * (u(1) - u(0)), u(0) * (rho - u(2)) - u(1),
          u(0) * u(1) - beta * u(2)};
}

FilteringProblem make_lorenz63_clipped(
    const std::map<std::string, double>& params) {
  reject_unknown(params, {"sigma", "rho", "beta", "R", "q", "c"});
  const double sigma = get_param(params, "sigma", 10.0);
  const double rho = get_param(params, "rho", 28.0);
  const double beta = get_param(params, "beta", 8.0 / 3.0);
  const double R = get_param(params, "R", 60.0);
  const double q = get_param(params, "q", 1.0);
  const double c = get_param(params, "c", 1.0);
  if (R <= 0.0) throw Error("lorenz63-clipped needs R > 0");

  // f(x) = f_L63(clip(x)) with clip the projection onto the ball of radius
  // R; the projection is 1-Lipschitz, so a Frobenius bound on the Jacobian
  // of f_L63 over the ball bounds ||f||_Lip.
  auto drift = [sigma, rho, beta, R](const Eigen::VectorXd& x) {
    Eigen::Vector3d u = x;
    const double norm = u.norm();
    if (norm > R) u *= R / norm;
    return Eigen::VectorXd(lorenz63(sigma, rho, beta, u));
  };
  const double lip =
      std::sqrt(2.0 * sigma * sigma + (rho + R) * (rho + R) + 1.0 +
                3.0 * R * R + beta * beta);

  auto prob = FilteringProblem::make(
      "lorenz63-clipped", 3, 3, drift,
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; },
      SymMatrix(q * Eigen::MatrixXd::Identity(3, 3)),
      SymMatrix(c * Eigen::MatrixXd::Identity(3, 3)), lip, 1.0, lip);
  prob.test_box_radius = 1.5 * R;
  return prob;
}

}  // namespace

FilteringProblem builtin_problem(
    const std::string& name, const std::map<std::string, double>& params) {
  if (name == "linear") return make_linear(params);
  if (name == "ornstein-uhlenbeck") return make_ou(params);
  if (name == "lorenz63-clipped") return make_lorenz63_clipped(params);
  throw Error("unknown built-in problem '" + name +
              "' (expected linear | ornstein-uhlenbeck | lorenz63-clipped)");
}

}  // namespace enkbf
