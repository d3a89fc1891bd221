#include "enkbf/discrete_filters.hpp"

#include <cmath>

namespace enkbf {

namespace {

void check_finite(const Eigen::MatrixXd& members, const char* where) {
  if (members.allFinite()) return;
  for (Eigen::Index i = 0; i < members.cols(); ++i) {
    if (!members.col(i).allFinite()) {
      throw BlowUpError(std::string("ensemble blow-up in ") + where +
                            " (member " + std::to_string(i + 1) + ")",
                        -1, static_cast<int>(i + 1));
    }
  }
}

// C + h/(M-1) G G^T, the innovation covariance of the increment update.
SymMatrix innovation_covariance(const Ensemble& forecast,
                                const FilteringProblem& problem, double h) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  const Eigen::MatrixXd& G = forecast.observed_anomalies();
  return SymMatrix(problem.C.mat() + (h / m1) * (G * G.transpose()));
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const SymMatrix gram(a.rows() <= a.cols()
                           ? Eigen::MatrixXd(a * a.transpose())
                           : Eigen::MatrixXd(a.transpose() * a));
  const SpectralDecomposition dec = sym_eigen(gram);
  return std::sqrt(std::max(0.0, dec.eigenvalues(0)));
}

Ensemble forecast_step(const FilteringProblem& problem, const Ensemble& ens,
                       const Eigen::MatrixXd& model_noise, double h) {
  if (model_noise.rows() != problem.d || model_noise.cols() != ens.size()) {
    throw Error("forecast noise block must be d x M");
  }
  Eigen::MatrixXd next = ens.members() +
                         h * problem.drift_columns(ens.members()) +
                         problem.sqrt_Q * model_noise;
  check_finite(next, "forecast_step");
  return Ensemble(std::move(next), problem);
}

Eigen::MatrixXd gain_discrete(const Ensemble& forecast,
                              const FilteringProblem& problem, double h) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  const Eigen::MatrixXd& E = forecast.anomalies();
  const Eigen::MatrixXd& G = forecast.observed_anomalies();
  const SymMatrix S = innovation_covariance(forecast, problem, h);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S.mat());
  if (ldlt.info() != Eigen::Success) {
    throw Error("innovation covariance solve failed (C not PD?)");
  }
  // K = (1/(M-1)) E G^T S^{-1}; solve on the transpose to avoid the inverse.
  return (ldlt.solve(G * E.transpose()) / m1).transpose();
}

Eigen::MatrixXd gain_hat(const Ensemble& forecast,
                         const FilteringProblem& problem) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  return forecast.anomalies() * forecast.observed_anomalies().transpose() *
         problem.inv_C / (2.0 * m1);
}

Eigen::MatrixXd gain_tilde(const Ensemble& forecast,
                           const FilteringProblem& problem, double h) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  const Eigen::MatrixXd& E = forecast.anomalies();
  const Eigen::MatrixXd& G = forecast.observed_anomalies();
  const SymMatrix S = innovation_covariance(forecast, problem, h);
  const Eigen::MatrixXd sqrt_S = sqrt_psd(S).mat();
  const Eigen::MatrixXd sum = problem.sqrt_C + sqrt_S;  // PD, invertible
  const Eigen::MatrixXd inv_sqrt_S =
      sqrt_S.ldlt().solve(Eigen::MatrixXd::Identity(problem.p, problem.p));
  return E * G.transpose() * inv_sqrt_S *
         sum.ldlt().solve(Eigen::MatrixXd::Identity(problem.p, problem.p)) /
         m1;
}

GainSet gain_set(const Ensemble& forecast, const FilteringProblem& problem,
                 double h) {
  GainSet gains;
  gains.K = gain_discrete(forecast, problem, h);
  gains.K_hat = gain_hat(forecast, problem);
  gains.K_tilde = gain_tilde(forecast, problem, h);
  gains.h = h;
  return gains;
}

Ensemble enkf_analysis(const FilteringProblem& problem,
                       const Ensemble& forecast, const Eigen::VectorXd& dY,
                       const Eigen::MatrixXd& obs_noise, double h) {
  if (dY.size() != problem.p) throw Error("dY must be p-dimensional");
  if (obs_noise.rows() != problem.p || obs_noise.cols() != forecast.size()) {
    throw Error("observation noise block must be p x M");
  }
  const Eigen::MatrixXd K = gain_discrete(forecast, problem, h);
  // Innovation per member: dY + sqrt(C) V^(i) - h g(X^(i),f).
  Eigen::MatrixXd innovation =
      (problem.sqrt_C * obs_noise - h * forecast.observed()).colwise() + dY;
  Eigen::MatrixXd next = forecast.members() + K * innovation;
  check_finite(next, "enkf_analysis");
  return Ensemble(std::move(next), problem);
}

SymMatrix transform_operator(const Ensemble& forecast,
                             const FilteringProblem& problem) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  const Eigen::MatrixXd& G = forecast.observed_anomalies();
  return SymMatrix(G.transpose() * problem.inv_C * G / m1);
}

Ensemble esrf_analysis(const FilteringProblem& problem,
                       const Ensemble& forecast, const Eigen::VectorXd& dY,
                       double h, EsrfVariant variant) {
  if (dY.size() != problem.p) throw Error("dY must be p-dimensional");
  const Eigen::MatrixXd K = gain_discrete(forecast, problem, h);
  const Eigen::VectorXd mean_a =
      forecast.mean() + K * (dY - h * forecast.observed_mean());

  Eigen::MatrixXd anomalies_a;
  if (variant == EsrfVariant::Etkf) {
    const SymMatrix S = transform_operator(forecast, problem);
    anomalies_a = forecast.anomalies() * inv_sqrt_shifted(S, h).mat();
  } else {
    const Eigen::MatrixXd K_tilde = gain_tilde(forecast, problem, h);
    anomalies_a = forecast.anomalies() -
                  h * K_tilde * forecast.observed_anomalies();
  }

  Eigen::MatrixXd next = anomalies_a.colwise() + mean_a;
  check_finite(next, "esrf_analysis");
  return Ensemble(std::move(next), problem);
}

Eigen::VectorXd remainder_norms(const Ensemble& forecast,
                                const FilteringProblem& problem, double h) {
  const SymMatrix S = transform_operator(forecast, problem);
  const Eigen::MatrixXd R =
      forecast.anomalies() * phi_remainder(S, h).mat();
  return R.colwise().norm();
}

Eigen::MatrixXd eakf_adjustment_matrix(const Ensemble& forecast,
                                       const FilteringProblem& problem,
                                       double h) {
  const double m1 = static_cast<double>(forecast.size() - 1);
  const Eigen::MatrixXd& E = forecast.anomalies();
  const SymMatrix S = transform_operator(forecast, problem);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
  const Eigen::MatrixXd E_pinv = cod.pseudoInverse();  // M x d
  const SymMatrix S_hat(m1 * E_pinv.transpose() * S.mat() * E_pinv);

  const Eigen::MatrixXd sqrt_P = sqrt_psd(forecast.covariance()).mat();
  const SymMatrix inner(sqrt_P * S_hat.mat() * sqrt_P);
  return sqrt_P * inv_sqrt_shifted(inner, h).mat() *
         pinv_sqrt_psd(forecast.covariance()).mat();
}

}  // namespace enkbf
