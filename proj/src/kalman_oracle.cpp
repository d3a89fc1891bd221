#include "enkbf/kalman_oracle.hpp"

namespace enkbf {

KalmanBucyState KalmanBucyState::from_problem(const FilteringProblem& problem,
                                              const Eigen::VectorXd& m0,
                                              const SymMatrix& Sigma0) {
  if (!problem.linear_A || !problem.linear_G) {
    throw Error("Kalman oracle requires a linear built-in problem");
  }
  KalmanBucyState state;
  state.m = m0;
  state.Sigma = Sigma0;
  state.A = *problem.linear_A;
  state.G = *problem.linear_G;
  return state;
}

KalmanBucyState kalman_bucy_step(const KalmanBucyState& state,
                                 const FilteringProblem& problem,
                                 const Eigen::VectorXd& dY, double h_fine) {
  const Eigen::MatrixXd& A = state.A;
  const Eigen::MatrixXd& G = state.G;
  const Eigen::MatrixXd& Sigma = state.Sigma.mat();
  const Eigen::MatrixXd gain = Sigma * G.transpose() * problem.inv_C;

  KalmanBucyState next = state;
  next.m = state.m + h_fine * (A * state.m) +
           gain * (dY - h_fine * (G * state.m));
  next.Sigma = SymMatrix(Sigma + h_fine * (A * Sigma +
                                           Sigma * A.transpose() +
                                           problem.Q.mat() -
                                           gain * G * Sigma));
  return next;
}

KalmanBucyState kalman_discrete_step(const KalmanBucyState& state,
                                     const FilteringProblem& problem,
                                     const Eigen::VectorXd& dY, double h) {
  const Eigen::MatrixXd& A = state.A;
  const Eigen::MatrixXd& G = state.G;
  const int d = static_cast<int>(state.m.size());

  const Eigen::MatrixXd F =
      Eigen::MatrixXd::Identity(d, d) + h * A;
  const Eigen::VectorXd m_f = F * state.m;
  const Eigen::MatrixXd Sigma_f =
      F * state.Sigma.mat() * F.transpose() + h * problem.Q.mat();

  // Observe z = dY/h with noise covariance C/h.
  const Eigen::MatrixXd innov_cov =
      G * Sigma_f * G.transpose() + problem.C.mat() / h;
  const Eigen::MatrixXd K =
      innov_cov.ldlt().solve(G * Sigma_f).transpose();

  KalmanBucyState next = state;
  next.m = m_f + K * (dY / h - G * m_f);
  // Joseph form keeps Sigma PSD.
  const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(d, d) - K * G;
  next.Sigma = SymMatrix(J * Sigma_f * J.transpose() +
                         K * (problem.C.mat() / h) * K.transpose());
  return next;
}

}  // namespace enkbf
