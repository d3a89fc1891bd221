#pragma once

#include <Eigen/Dense>

#include "enkbf/linalg.hpp"
#include "enkbf/problem.hpp"

namespace enkbf {

/// Mean and covariance of the exact linear-Gaussian filter, together with
/// the model matrices they evolve under.
struct KalmanBucyState {
  Eigen::VectorXd m;
  SymMatrix Sigma;
  Eigen::MatrixXd A;
  Eigen::MatrixXd G;

  static KalmanBucyState from_problem(const FilteringProblem& problem,
                                      const Eigen::VectorXd& m0,
                                      const SymMatrix& Sigma0);
};

/// Explicit Euler step of the Kalman-Bucy equations
///   dm     = A m dt + Sigma G^T C^{-1} (dY - G m dt)
///   dSigma = (A Sigma + Sigma A^T + Q - Sigma G^T C^{-1} G Sigma) dt
/// with the covariance update symmetrized.
KalmanBucyState kalman_bucy_step(const KalmanBucyState& state,
                                 const FilteringProblem& problem,
                                 const Eigen::VectorXd& dY, double h_fine);

/// Discrete Kalman predict/update for the Euler-discretized model observing
/// the increment dY (equivalently z = dY/h with noise covariance C/h):
///   predict: m = (Id + hA) m,  Sigma = (Id+hA) Sigma (Id+hA)^T + hQ
///   update:  K = Sigma G^T (G Sigma G^T + C/h)^{-1}, Joseph-form Sigma.
KalmanBucyState kalman_discrete_step(const KalmanBucyState& state,
                                     const FilteringProblem& problem,
                                     const Eigen::VectorXd& dY, double h);

}  // namespace enkbf
