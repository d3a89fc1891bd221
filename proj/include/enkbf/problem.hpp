#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "enkbf/linalg.hpp"

namespace enkbf {

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// A continuous-time filtering problem: signal drift f, observation map g,
/// positive definite noise covariances Q (model) and C (observation), with
/// cached square roots / inverse and declared Lipschitz descriptors.
struct FilteringProblem {
  std::string name;
  int d = 0;  // state dimension
  int p = 0;  // observation dimension
  VectorField drift;    // f: R^d -> R^d
  VectorField observe;  // g: R^d -> R^p

  SymMatrix Q;  // d x d, positive definite
  SymMatrix C;  // p x p, positive definite

  // Derived caches, filled by make().
  Eigen::MatrixXd sqrt_Q;
  Eigen::MatrixXd sqrt_C;
  Eigen::MatrixXd inv_C;

  double lip_f = 0.0;       // ||f||_Lip, declared
  double lip_g = 0.0;       // ||g||_Lip, declared
  double onesided_f = 0.0;  // |f|_+, declared (may be negative)

  // Box [-r, r]^d used by the sampled Lipschitz spot-check.
  double test_box_radius = 10.0;

  // Set for the linear built-ins; consumed by the Kalman oracles.
  std::optional<Eigen::MatrixXd> linear_A;
  std::optional<Eigen::MatrixXd> linear_G;

  /// kappa_K = ||g||_Lip * ||C^{-1}|| of the gain estimates.
  double kappa_K() const;

  /// Computes the derived matrices and verifies positive definiteness.
  static FilteringProblem make(std::string name, int d, int p,
                               VectorField drift, VectorField observe,
                               SymMatrix Q, SymMatrix C, double lip_f,
                               double lip_g, double onesided_f);

  /// Applies g to every column of a d x M block, giving a p x M block.
  Eigen::MatrixXd observe_columns(const Eigen::MatrixXd& states) const;

  /// Applies f to every column.
  Eigen::MatrixXd drift_columns(const Eigen::MatrixXd& states) const;
};

/// Spot-checks the declared Lipschitz constants of f and g on `pairs`
/// random pairs in the problem's test box; throws on violation.
void check_lipschitz_declarations(const FilteringProblem& problem,
                                  std::uint64_t seed, int pairs = 1000);

/// Built-in problems: "linear" (f = a*x, g = gscale*x), "ornstein-uhlenbeck"
/// (f = -theta*x, g = x) and "lorenz63-clipped" (Lorenz-63 drift applied to
/// the radial clipping of x onto the ball of radius R, full observation).
/// Unknown keys in params are rejected.
FilteringProblem builtin_problem(const std::string& name,
                                 const std::map<std::string, double>& params);

}  // namespace enkbf
