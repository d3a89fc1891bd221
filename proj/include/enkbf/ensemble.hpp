#pragma once

#include <Eigen/Dense>

#include "enkbf/linalg.hpp"
#include "enkbf/problem.hpp"

namespace enkbf {

/// An ensemble of M state vectors with eagerly cached statistics: mean,
/// anomalies E, observed images g(X^(i)) with their mean and anomalies, and
/// the empirical covariance P = E E^T / (M-1).
class Ensemble {
 public:
  Ensemble(Eigen::MatrixXd members, const FilteringProblem& problem);

  int dim() const { return static_cast<int>(members_.rows()); }
  int size() const { return static_cast<int>(members_.cols()); }

  const Eigen::MatrixXd& members() const { return members_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& anomalies() const { return anomalies_; }  // E
  const Eigen::MatrixXd& observed() const { return observed_; }    // g(X)
  const Eigen::VectorXd& observed_mean() const { return observed_mean_; }
  const Eigen::MatrixXd& observed_anomalies() const {  // script-G
    return observed_anomalies_;
  }
  const SymMatrix& covariance() const { return covariance_; }
  double trace_cov() const { return trace_cov_; }

  bool all_finite() const { return members_.allFinite(); }

 private:
  Eigen::MatrixXd members_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd anomalies_;
  Eigen::MatrixXd observed_;
  Eigen::VectorXd observed_mean_;
  Eigen::MatrixXd observed_anomalies_;
  SymMatrix covariance_;
  double trace_cov_ = 0.0;
};

}  // namespace enkbf
