#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "enkbf/continuous_filters.hpp"
#include "enkbf/discrete_filters.hpp"
#include "enkbf/experiments.hpp"
#include "test_support.hpp"

using namespace enkbf;
using enkbf_test::Rng;

namespace {

struct ScalarInstance {
  FilteringProblem problem = enkbf_test::linear_test_problem(1, -1.0, 1.0,
                                                             1.0);
  Ensemble ensemble;

  ScalarInstance()
      : ensemble((Eigen::MatrixXd(1, 2) << 0.0, 2.0).finished(), problem) {}
};

}  // namespace

TEST_CASE("continuous gain: constant observation and scalar formula") {
  Rng rng(30);
  auto constant_obs = FilteringProblem::make(
      "constant-obs", 2, 1,
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; },
      [](const Eigen::VectorXd&) -> Eigen::VectorXd {
        return Eigen::VectorXd::Zero(1);
      },
      SymMatrix(Eigen::MatrixXd::Identity(2, 2)),
      SymMatrix(Eigen::MatrixXd::Identity(1, 1)), 1.0, 0.0, -1.0);
  const Ensemble flat(rng.matrix(2, 4), constant_obs);
  CHECK(gain_continuous(flat, constant_obs).norm() == 0.0);

  ScalarInstance inst;
  CHECK(gain_continuous(inst.ensemble, inst.problem)(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("discrete gain converges to the continuous gain at rate 1") {
  Rng rng(31);
  const FilteringProblem problem = enkbf_test::nonlinear_problem(rng, 3, 2);
  const Ensemble ens(rng.matrix(3, 6), problem);
  const Eigen::MatrixXd k_cont = gain_continuous(ens, problem);
  std::vector<double> lx, ly;
  for (const double h :
       {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    lx.push_back(std::log2(h));
    ly.push_back(std::log2((gain_discrete(ens, problem, h) - k_cont).norm()));
  }
  CHECK(fit_line(lx, ly).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("degenerate step is the identity") {
  // f = 0, constant g (so K = 0), vanishing Q: members do not move.
  Rng rng(32);
  auto problem = FilteringProblem::make(
      "inert", 2, 1,
      [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return Eigen::VectorXd::Zero(x.size());
      },
      [](const Eigen::VectorXd&) -> Eigen::VectorXd {
        return Eigen::VectorXd::Constant(1, 5.0);
      },
      SymMatrix(1e-300 * Eigen::MatrixXd::Identity(2, 2)),
      SymMatrix(Eigen::MatrixXd::Identity(1, 1)), 0.0, 0.0, 0.0);
  const Ensemble ens(rng.matrix(2, 4), problem);
  const Eigen::VectorXd dY = Eigen::VectorXd::Constant(1, 0.3);
  const Eigen::MatrixXd zero_d = Eigen::MatrixXd::Zero(2, 4);
  const Eigen::MatrixXd zero_p = Eigen::MatrixXd::Zero(1, 4);
  CHECK(enkbf_step(problem, ens, dY, zero_d, zero_p, 0.01).members() ==
        ens.members());
  CHECK(etkbf_step(problem, ens, dY, zero_d, 0.01).members() ==
        ens.members());
}

TEST_CASE("one scalar perturbed-observation step, hand evaluated") {
  ScalarInstance inst;
  const double h = 0.1, y_prime = 1.0;
  const Eigen::VectorXd dY = Eigen::VectorXd::Constant(1, h * y_prime);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 2);
  const Ensemble next =
      enkbf_step(inst.problem, inst.ensemble, dY, zero, zero, h);
  // X += h f(X) + K (h y' - h X) with K = 2:
  CHECK(next.members()(0, 0) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(next.members()(0, 1) == doctest::Approx(1.6).epsilon(1e-13));
}

TEST_CASE("transform step: ensemble mean moves by the mean equation") {
  Rng rng(33);
  const FilteringProblem problem = enkbf_test::nonlinear_problem(rng, 3, 2);
  const Ensemble ens(rng.matrix(3, 5), problem);
  const double h = 1.0 / 64;
  const Eigen::VectorXd dY = 0.05 * rng.vector(2);
  const Eigen::MatrixXd dW = std::sqrt(h) * rng.matrix(3, 5);
  const Ensemble next = etkbf_step(problem, ens, dY, dW, h);

  const Eigen::VectorXd fbar =
      problem.drift_columns(ens.members()).rowwise().mean();
  const Eigen::VectorXd wbar = dW.rowwise().mean();
  const Eigen::MatrixXd K = gain_continuous(ens, problem);
  const Eigen::VectorXd expected = ens.mean() + h * fbar +
                                   problem.sqrt_Q * wbar +
                                   K * (dY - h * ens.observed_mean());
  CHECK((next.mean() - expected).norm() <= 1e-13 * (1.0 + expected.norm()));
}

TEST_CASE("per-step trace growth bound with zeroed noise") {
  Rng rng(34);
  for (const double h : {1.0 / 256, 1.0 / 1024}) {
    for (int trial = 0; trial < 50; ++trial) {
      // Mix contracting, neutral and expanding drifts plus a nonlinear g.
      const double a = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? -1.0 : 0.0);
      const int d = rng.uniform_int(1, 4);
      const int p = rng.uniform_int(1, 4);
      const FilteringProblem problem =
          enkbf_test::nonlinear_problem(rng, d, p, a);
      const Ensemble ens(2.0 * rng.matrix(d, rng.uniform_int(2, 8)), problem);
      const Eigen::VectorXd dY = Eigen::VectorXd::Zero(problem.p);
      const Eigen::MatrixXd dW = Eigen::MatrixXd::Zero(d, ens.size());
      const Ensemble next = etkbf_step(problem, ens, dY, dW, h);
      const double increase = next.trace_cov() - ens.trace_cov();
      const double bound =
          1.1 * (2.0 * problem.lip_f * ens.trace_cov() + problem.Q.trace()) *
          h;
      CHECK(increase <= bound);
    }
  }
}

TEST_CASE("gain bound holds along a filtering run") {
  Rng rng(35);
  const FilteringProblem problem = enkbf_test::nonlinear_problem(rng, 2, 2);
  const double kappa = problem.kappa_K();
  Ensemble ens(rng.matrix(2, 6), problem);
  const double h = 1.0 / 128;
  for (int k = 0; k < 200; ++k) {
    const Eigen::MatrixXd K = gain_continuous(ens, problem);
    CHECK(spectral_norm(K) <= kappa * ens.trace_cov() * (1.0 + 1e-9));
    const Eigen::VectorXd dY = 0.05 * rng.vector(2);
    const Eigen::MatrixXd dW = std::sqrt(h) * rng.matrix(2, 6);
    ens = etkbf_step(problem, ens, dY, dW, h);
  }
}

TEST_CASE("steps commute with member permutations") {
  Rng rng(36);
  const FilteringProblem problem = enkbf_test::nonlinear_problem(rng, 3, 2);
  const int M = 6;
  const Eigen::MatrixXd members = rng.matrix(3, M);
  const Eigen::VectorXd dY = 0.1 * rng.vector(2);
  const Eigen::MatrixXd dW = 0.1 * rng.matrix(3, M);
  const Eigen::MatrixXd dV = 0.1 * rng.matrix(2, M);
  const double h = 1.0 / 64;

  std::vector<int> perm(M);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[0], perm[3]);
  std::swap(perm[1], perm[5]);

  const auto permuted = [&](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd out(a.rows(), a.cols());
    for (int i = 0; i < M; ++i) out.col(i) = a.col(perm[i]);
    return out;
  };

  const Ensemble base(members, problem);
  const Ensemble shuffled(permuted(members), problem);

  const Ensemble next = enkbf_step(problem, base, dY, dW, dV, h);
  const Ensemble next_shuffled =
      enkbf_step(problem, shuffled, dY, permuted(dW), permuted(dV), h);
  CHECK((next_shuffled.members() - permuted(next.members())).norm() <=
        1e-12 * (1.0 + next.members().norm()));

  const Ensemble t_next = etkbf_step(problem, base, dY, dW, h);
  const Ensemble t_shuffled =
      etkbf_step(problem, shuffled, dY, permuted(dW), h);
  CHECK((t_shuffled.members() - permuted(t_next.members())).norm() <=
        1e-12 * (1.0 + t_next.members().norm()));
}

TEST_CASE("non-finite members abort the step with a report") {
  ScalarInstance inst;
  Eigen::MatrixXd huge(1, 2);
  huge << 1e308, -1e308;
  const Ensemble ens(huge, inst.problem);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 2);
  CHECK_THROWS_AS(
      enkbf_step(inst.problem, ens, Eigen::VectorXd::Zero(1), zero, zero,
                 4.0),
      BlowUpError);
}
