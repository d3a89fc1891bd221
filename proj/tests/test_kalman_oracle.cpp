#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "enkbf/experiments.hpp"
#include "enkbf/kalman_oracle.hpp"

using namespace enkbf;

namespace {

const Eigen::VectorXd kZeroObs = Eigen::VectorXd::Zero(1);

KalmanBucyState scalar_state(const FilteringProblem& p, double m0,
                             double sigma0) {
  return KalmanBucyState::from_problem(
      p, Eigen::VectorXd::Constant(1, m0),
      SymMatrix(sigma0 * Eigen::MatrixXd::Identity(1, 1)));
}

}  // namespace

TEST_CASE("zero noise and zero initial covariance stay deterministic") {
  const FilteringProblem p =
      builtin_problem("linear", {{"q", 1e-300}, {"d", 2.0}});
  KalmanBucyState state = KalmanBucyState::from_problem(
      p, Eigen::VectorXd::Ones(2), SymMatrix::Zero(2));
  const double h = 1.0 / 256;
  double expected = 1.0;
  for (int k = 1; k <= 256; ++k) {
    state = kalman_bucy_step(state, p, Eigen::VectorXd::Zero(2), h);
    expected *= (1.0 - h);
    // Sigma = 0 kills the gain, so the mean follows the deterministic ODE.
    CHECK(state.Sigma.mat().norm() <= 1e-290);
    CHECK(state.m(0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("stationary Riccati variance of the scalar model") {
  const FilteringProblem p = builtin_problem("linear", {});
  KalmanBucyState state = scalar_state(p, 0.0, 1.0);
  const double h = 1e-3;
  for (int k = 0; k < 10000; ++k) {
    state = kalman_bucy_step(state, p, kZeroObs, h);
  }
  CHECK(std::abs(state.Sigma(0, 0) - (std::sqrt(2.0) - 1.0)) <= 1e-3);
}

TEST_CASE("covariance stays symmetric along the integration") {
  const FilteringProblem p = builtin_problem("linear", {{"d", 3.0}});
  Eigen::MatrixXd sigma0(3, 3);
  sigma0 << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  KalmanBucyState state = KalmanBucyState::from_problem(
      p, Eigen::VectorXd::Ones(3), SymMatrix(sigma0));
  for (int k = 0; k < 500; ++k) {
    state = kalman_bucy_step(state, p, Eigen::VectorXd::Zero(3), 1e-2);
    CHECK((state.Sigma.mat() - state.Sigma.mat().transpose()).norm() <=
          1e-12);
  }
}

TEST_CASE("discrete oracle: zero observation matrix is pure prediction") {
  const FilteringProblem p =
      builtin_problem("linear", {{"gscale", 0.0}, {"d", 1.0}});
  KalmanBucyState state = scalar_state(p, 1.0, 1.0);
  const double h = 0.25;
  state = kalman_discrete_step(state, p, kZeroObs, h);
  CHECK(state.m(0) == doctest::Approx((1.0 - h) * 1.0));
  CHECK(state.Sigma(0, 0) ==
        doctest::Approx((1.0 - h) * (1.0 - h) * 1.0 + h));
}

TEST_CASE("discrete oracle: hand-evaluated scalar predict/update cycle") {
  // A = 0, G = Q = C = 1, h = 0.1, Sigma0 = 1, dY = 0.05.
  const FilteringProblem p = builtin_problem("linear", {{"a", 0.0}});
  KalmanBucyState state = scalar_state(p, 0.0, 1.0);
  const double h = 0.1;
  state = kalman_discrete_step(state, p,
                               Eigen::VectorXd::Constant(1, 0.05), h);
  const double sigma_f = 1.0 + h;              // 1.1
  const double innov_cov = sigma_f + 1.0 / h;  // 11.1
  const double gain = sigma_f / innov_cov;
  CHECK(state.m(0) == doctest::Approx(gain * 0.5).epsilon(1e-12));
  CHECK(state.Sigma(0, 0) ==
        doctest::Approx(sigma_f * (1.0 - gain)).epsilon(1e-12));
}

TEST_CASE("discrete covariance path converges to the continuous one") {
  const FilteringProblem p = builtin_problem("linear", {});
  const double h_fine = 1.0 / 4096;
  std::vector<double> lx, ly;
  for (const double h : {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    KalmanBucyState cont = scalar_state(p, 0.0, 1.0);
    KalmanBucyState disc = cont;
    const int ratio = static_cast<int>(std::llround(h / h_fine));
    double gap = 0.0;
    for (int k = 1; k <= static_cast<int>(std::llround(1.0 / h)); ++k) {
      for (int j = 0; j < ratio; ++j) {
        cont = kalman_bucy_step(cont, p, kZeroObs, h_fine);
      }
      disc = kalman_discrete_step(disc, p, kZeroObs, h);
      gap = std::max(gap, std::abs(disc.Sigma(0, 0) - cont.Sigma(0, 0)));
    }
    lx.push_back(std::log2(h));
    ly.push_back(std::log2(gap));
  }
  const LineFit fit = fit_line(lx, ly);
  CHECK(fit.slope >= 0.9);
}

TEST_CASE("oracle requires a linear problem") {
  const FilteringProblem p = builtin_problem("lorenz63-clipped", {});
  CHECK_THROWS_AS(KalmanBucyState::from_problem(p, Eigen::VectorXd::Zero(3),
                                                SymMatrix::Identity(3)),
                  Error);
}
