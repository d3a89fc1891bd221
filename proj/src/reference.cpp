#include "enkbf/reference.hpp"

namespace enkbf {

Eigen::VectorXd ReferenceRun::coarse_obs_increment(int coarse_node,
                                                   int ratio) const {
  const int last = coarse_node * ratio;
  if (ratio < 1 || coarse_node < 1 || last > node_count()) {
    throw Error("coarse observation cell out of range");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(obs_increments.rows());
  for (int node = (coarse_node - 1) * ratio + 1; node <= last; ++node) {
    sum += obs_increments.col(node - 1);
  }
  return sum;
}

ReferenceRun simulate_reference(const FilteringProblem& problem,
                                const BrownianLattice& lattice,
                                const Eigen::VectorXd& x0) {
  if (x0.size() != problem.d || lattice.state_dim() != problem.d) {
    throw Error("reference initial state / lattice dimension mismatch");
  }
  const int n = lattice.node_count();
  const double h = lattice.h_fine();

  ReferenceRun run;
  run.h_fine = h;
  run.seed = lattice.seed();
  run.states.resize(problem.d, n + 1);
  run.states.col(0) = x0;
  for (int k = 1; k <= n; ++k) {
    const Eigen::VectorXd prev = run.states.col(k - 1);
    run.states.col(k) =
        prev + h * problem.drift(prev) +
        problem.sqrt_Q * lattice.fine_increment(Channel::ModelRef, 0, k);
    if (!run.states.col(k).allFinite()) {
      throw BlowUpError("reference blow-up at node " + std::to_string(k), k,
                        -1);
    }
  }
  return run;
}

ReferenceRun generate_observations(const FilteringProblem& problem,
                                   ReferenceRun run,
                                   const BrownianLattice& lattice) {
  if (run.states.rows() != problem.d ||
      lattice.obs_dim() != problem.p ||
      run.node_count() != lattice.node_count()) {
    throw Error("observation synthesis dimension mismatch");
  }
  const int n = run.node_count();
  const double h = run.h_fine;
  run.obs_increments.resize(problem.p, n);
  for (int k = 1; k <= n; ++k) {
    run.obs_increments.col(k - 1) =
        h * problem.observe(run.states.col(k - 1)) +
        problem.sqrt_C * lattice.fine_increment(Channel::ObsShared, 0, k);
  }
  return run;
}

}  // namespace enkbf
