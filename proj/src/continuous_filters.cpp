#include "enkbf/continuous_filters.hpp"

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

}  // namespace

Eigen::MatrixXd gain_continuous(const Ensemble& ens,
                                const FilteringProblem& problem) {
  const double m1 = static_cast<double>(ens.size() - 1);
  return ens.anomalies() * ens.observed_anomalies().transpose() *
         problem.inv_C / m1;
}

Ensemble enkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    const Eigen::MatrixXd& dV, double h_fine,
                    const Eigen::MatrixXd& gain) {
  Eigen::MatrixXd innovation =
      (problem.sqrt_C * dV - h_fine * ens.observed()).colwise() + dY;
  Eigen::MatrixXd next = ens.members() +
                         h_fine * problem.drift_columns(ens.members()) +
                         problem.sqrt_Q * dW + gain * innovation;
  check_finite(next, "enkbf_step");
  return Ensemble(std::move(next), problem);
}

Ensemble enkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    const Eigen::MatrixXd& dV, double h_fine) {
  return enkbf_step(problem, ens, dY, dW, dV, h_fine,
                    gain_continuous(ens, problem));
}

Ensemble etkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    double h_fine, const Eigen::MatrixXd& gain) {
  // dY - h/2 (g(X^(i)) + gbar) per member.
  Eigen::MatrixXd innovation =
      (-0.5 * h_fine *
       (ens.observed().colwise() + ens.observed_mean()))
          .colwise() +
      dY;
  Eigen::MatrixXd next = ens.members() +
                         h_fine * problem.drift_columns(ens.members()) +
                         problem.sqrt_Q * dW + gain * innovation;
  check_finite(next, "etkbf_step");
  return Ensemble(std::move(next), problem);
}

Ensemble etkbf_step(const FilteringProblem& problem, const Ensemble& ens,
                    const Eigen::VectorXd& dY, const Eigen::MatrixXd& dW,
                    double h_fine) {
  return etkbf_step(problem, ens, dY, dW, h_fine,
                    gain_continuous(ens, problem));
}

}  // namespace enkbf
