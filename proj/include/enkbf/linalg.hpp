#pragma once

#include <Eigen/Dense>
#include <functional>

#include "enkbf/errors.hpp"

namespace enkbf {

/// Dense symmetric matrix. Construction symmetrizes, so entries(i,j) and
/// entries(j,i) are bitwise equal afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& a);

  static SymMatrix Identity(int dim);
  static SymMatrix Zero(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }

 private:
  Eigen::MatrixXd m_;
};

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending,
/// eigenvectors stored as columns of an orthogonal matrix.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::MatrixXd reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

SpectralDecomposition sym_eigen(const SymMatrix& a);

/// Applies a scalar function to the spectrum: V f(Lambda) V^T.
SymMatrix spectral_map(const SymMatrix& a,
                       const std::function<double(double)>& f);

/// Symmetric PSD square root. Eigenvalues in (-tol, 0) with
/// tol = 1e-10 * ||a|| are clamped to zero; anything below -tol throws.
SymMatrix sqrt_psd(const SymMatrix& a);

/// Moore-Penrose pseudo-inverse of sqrt_psd(a): lambda^{-1/2} on eigenvalues
/// above the relative rank cutoff 1e-12 * lambda_max, zero below.
SymMatrix pinv_sqrt_psd(const SymMatrix& a);

/// (Id + h*s)^{-1/2} for PSD s and h >= 0. Eigenvalues of the result lie in
/// (0, 1].
SymMatrix inv_sqrt_shifted(const SymMatrix& s, double h);

/// phi applied spectrally to h*s, where phi(x) = (1+x)^{-1/2} - 1 + x/2.
/// This is the second-order remainder of the square-root transform; the
/// result is symmetric PSD and vanishes at h = 0.
SymMatrix phi_remainder(const SymMatrix& s, double h);

/// Scalar phi(x) = (1+x)^{-1/2} - 1 + x/2, series-evaluated near zero to
/// avoid cancellation.
double phi_scalar(double x);

}  // namespace enkbf
