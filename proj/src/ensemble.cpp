#include "enkbf/ensemble.hpp"

namespace enkbf {

Ensemble::Ensemble(Eigen::MatrixXd members, const FilteringProblem& problem)
    : members_(std::move(members)) {
  if (members_.rows() != problem.d) {
    throw Error("ensemble state dimension mismatch");
  }
  if (members_.cols() < 2) {
    throw Error("ensemble needs M >= 2 members (M-1 divides the statistics)");
  }
  const double m = static_cast<double>(size());
  mean_ = members_.rowwise().sum() / m;
  anomalies_ = members_.colwise() - mean_;
  observed_ = problem.observe_columns(members_);
  observed_mean_ = observed_.rowwise().sum() / m;
  observed_anomalies_ = observed_.colwise() - observed_mean_;
  covariance_ = SymMatrix(anomalies_ * anomalies_.transpose() / (m - 1.0));
  trace_cov_ = covariance_.trace();
}

}  // namespace enkbf
