#pragma once

#include <Eigen/Dense>

#include "enkbf/noise.hpp"
#include "enkbf/problem.hpp"

namespace enkbf {

/// Euler-Maruyama reference trajectory on the fine grid, plus the synthetic
/// observation increments generated from it.
struct ReferenceRun {
  double h_fine = 0.0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd states;          // d x (N+1), column j is X_{t_j}
  Eigen::MatrixXd obs_increments;  // p x N, column k-1 is dY over cell k

  int node_count() const { return static_cast<int>(states.cols()) - 1; }

  /// Exact sum of the fine observation increments of coarse cell
  /// `coarse_node` at step ratio * h_fine.
  Eigen::VectorXd coarse_obs_increment(int coarse_node, int ratio) const;
};

/// X_{j+1} = X_j + h_fine f(X_j) + sqrt(Q) dW_j with dW from the lattice's
/// reference channel. Throws BlowUpError at the first non-finite state.
ReferenceRun simulate_reference(const FilteringProblem& problem,
                                const BrownianLattice& lattice,
                                const Eigen::VectorXd& x0);

/// Fills obs_increments: dY_k = h_fine g(X_{t_{k-1}}) + sqrt(C) dV_k with dV
/// from the shared observation channel.
ReferenceRun generate_observations(const FilteringProblem& problem,
                                   ReferenceRun run,
                                   const BrownianLattice& lattice);

}  // namespace enkbf
