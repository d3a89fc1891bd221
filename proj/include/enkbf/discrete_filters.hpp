#pragma once

#include <Eigen/Dense>

#include "enkbf/ensemble.hpp"

namespace enkbf {

/// Discrete gains of one analysis step: the Kalman gain K, the half-gain
/// K_hat used by the EAKF/ETKF form, and the square-root gain K_tilde of
/// the unperturbed filter.
struct GainSet {
  Eigen::MatrixXd K;
  Eigen::MatrixXd K_hat;
  Eigen::MatrixXd K_tilde;
  double h = 0.0;
};

enum class EsrfVariant { Etkf, Unperturbed };

/// Forecast: X^(i),f = X^(i),a + h f(X^(i),a) + sqrt(Q) W^(i) with W the raw
/// Brownian increments (d x M). Throws BlowUpError on non-finite members.
Ensemble forecast_step(const FilteringProblem& problem, const Ensemble& ens,
                       const Eigen::MatrixXd& model_noise, double h);

/// K = (1/(M-1)) E G^T (C + h/(M-1) G G^T)^{-1} with G the observed
/// anomalies of the forecast ensemble.
Eigen::MatrixXd gain_discrete(const Ensemble& forecast,
                              const FilteringProblem& problem, double h);

/// K_hat = (1/(2(M-1))) E G^T C^{-1}.
Eigen::MatrixXd gain_hat(const Ensemble& forecast,
                         const FilteringProblem& problem);

/// K_tilde = (1/(M-1)) E G^T S^{-1/2} (C^{1/2} + S^{1/2})^{-1} with
/// S = C + h/(M-1) G G^T.
Eigen::MatrixXd gain_tilde(const Ensemble& forecast,
                           const FilteringProblem& problem, double h);

GainSet gain_set(const Ensemble& forecast, const FilteringProblem& problem,
                 double h);

/// Perturbed-observation analysis:
/// X^(i),a = X^(i),f + K (dY + sqrt(C) V^(i) - h g(X^(i),f)).
Ensemble enkf_analysis(const FilteringProblem& problem,
                       const Ensemble& forecast, const Eigen::VectorXd& dY,
                       const Eigen::MatrixXd& obs_noise, double h);

/// Square-root analysis. The mean moves by K (dY - h gbar); anomalies are
/// transformed so that P^a = P^f - h/(M-1) K G E^T holds exactly:
///   Etkf:        E^a = E (Id + h S)^{-1/2},  S = (1/(M-1)) G^T C^{-1} G
///   Unperturbed: E^a = E - h K_tilde G
Ensemble esrf_analysis(const FilteringProblem& problem,
                       const Ensemble& forecast, const Eigen::VectorXd& dY,
                       double h, EsrfVariant variant);

/// Norms of the per-member transform remainders R e_i with
/// R = E phi(h S) (the difference between the exact ETKF transform and its
/// first-order expansion).
Eigen::VectorXd remainder_norms(const Ensemble& forecast,
                                const FilteringProblem& problem, double h);

/// S = (1/(M-1)) G^T C^{-1} G, the M x M ensemble-space operator of the
/// ETKF transform.
SymMatrix transform_operator(const Ensemble& forecast,
                             const FilteringProblem& problem);

/// State-space adjustment form of the square-root transform,
///   A = sqrt(P) (Id + h sqrt(P) Shat sqrt(P))^{-1/2} pinv(sqrt(P)),
/// with Shat the compression of the observation-space operator onto the
/// ensemble span, Shat = (M-1) (E^+)^T S E^+. On the span, A E equals the
/// ensemble-space route E (Id + h S)^{-1/2}; the analysis never uses this
/// form, it exists for verification.
Eigen::MatrixXd eakf_adjustment_matrix(const Ensemble& forecast,
                                       const FilteringProblem& problem,
                                       double h);

/// Spectral norm (largest singular value) via the symmetric eigensolver.
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace enkbf
