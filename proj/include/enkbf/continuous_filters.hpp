#pragma once

#include <Eigen/Dense>

#include "enkbf/ensemble.hpp"

namespace enkbf {

/// Continuous-time Kalman gain K_t = (1/(M-1)) E G^T C^{-1}.
Eigen::MatrixXd gain_continuous(const Ensemble& ens,
                                const FilteringProblem& problem);

/// One explicit Euler-Maruyama step of the perturbed-observation SDE:
/// X^(i) += h f(X^(i)) + sqrt(Q) dW^(i) + K (dY + sqrt(C) dV^(i) - h g(X^(i)))
/// with K frozen at the cell start. dW (d x M) and dV (p x M) are raw
/// Brownian increments of the fine cell.
Ensemble enkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    const Eigen::MatrixXd& dV, double h_fine);

/// Same step with the frozen gain supplied by the caller (it equals
/// gain_continuous(ens, problem)).
Ensemble enkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    const Eigen::MatrixXd& dV, double h_fine,
                    const Eigen::MatrixXd& gain);

/// One explicit Euler-Maruyama step of the transform SDE:
/// X^(i) += h f(X^(i)) + sqrt(Q) dW^(i) + K (dY - h/2 (g(X^(i)) + gbar)).
Ensemble etkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    double h_fine);

Ensemble etkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    double h_fine, const Eigen::MatrixXd& gain);

}  // namespace enkbf
