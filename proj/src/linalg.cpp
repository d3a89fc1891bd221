#include "enkbf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace enkbf {

namespace {

std::string fingerprint(const Eigen::MatrixXd& a) {
  std::ostringstream os;
  os << "dim=" << a.rows() << " trace=" << a.trace() << " fro=" << a.norm();
  return os.str();
}

// Relative clamping tolerance for nearly-PSD inputs (round-off in empirical
// covariances produces tiny negative eigenvalues).
constexpr double kPsdTolRel = 1e-10;
// Relative rank cutoff for pseudo-inverses.
constexpr double kRankCutRel = 1e-12;

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error("SymMatrix requires a square matrix, got " +
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::Identity(int dim) {
  return SymMatrix(Eigen::MatrixXd::Identity(dim, dim));
}

SymMatrix SymMatrix::Zero(int dim) {
  return SymMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SpectralDecomposition sym_eigen(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw EigenSolveError("symmetric eigen-solver failed to converge: " +
                          fingerprint(a.mat()));
  }
  // Eigen sorts ascending; flip to descending.
  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues().reverse();
  dec.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return dec;
}

SymMatrix spectral_map(const SymMatrix& a,
                       const std::function<double(double)>& f) {
  const SpectralDecomposition dec = sym_eigen(a);
  Eigen::VectorXd mapped(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    mapped(i) = f(dec.eigenvalues(i));
  }
  return SymMatrix(dec.eigenvectors * mapped.asDiagonal() *
                   dec.eigenvectors.transpose());
}

namespace {

// Shared precondition: clamp eigenvalues in (-tol, 0) to zero, reject below.
Eigen::VectorXd clamped_psd_spectrum(const SpectralDecomposition& dec,
                                     const Eigen::MatrixXd& original) {
  const double scale = dec.eigenvalues.size() > 0
                           ? std::max(std::abs(dec.eigenvalues(0)),
                                      std::abs(dec.eigenvalues(
                                          dec.eigenvalues.size() - 1)))
                           : 0.0;
  const double tol = kPsdTolRel * scale;
  Eigen::VectorXd ev = dec.eigenvalues;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) {
      throw NotPsdError("matrix is not PSD (eigenvalue " +
                        std::to_string(ev(i)) + " below -" +
                        std::to_string(tol) + "): " + fingerprint(original));
    }
    if (ev(i) < 0.0) ev(i) = 0.0;
  }
  return ev;
}

}  // namespace

SymMatrix sqrt_psd(const SymMatrix& a) {
  const SpectralDecomposition dec = sym_eigen(a);
  Eigen::VectorXd ev = clamped_psd_spectrum(dec, a.mat());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(ev(i));
  return SymMatrix(dec.eigenvectors * ev.asDiagonal() *
                   dec.eigenvectors.transpose());
}

SymMatrix pinv_sqrt_psd(const SymMatrix& a) {
  const SpectralDecomposition dec = sym_eigen(a);
  Eigen::VectorXd ev = clamped_psd_spectrum(dec, a.mat());
  const double cut = ev.size() > 0 ? kRankCutRel * ev(0) : 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = ev(i) > cut ? 1.0 / std::sqrt(ev(i)) : 0.0;
  }
  return SymMatrix(dec.eigenvectors * ev.asDiagonal() *
                   dec.eigenvectors.transpose());
}

SymMatrix inv_sqrt_shifted(const SymMatrix& s, double h) {
  if (h < 0.0) throw Error("inv_sqrt_shifted requires h >= 0");
  const SpectralDecomposition dec = sym_eigen(s);
  Eigen::VectorXd ev = clamped_psd_spectrum(dec, s.mat());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = 1.0 / std::sqrt(1.0 + h * ev(i));
  }
  return SymMatrix(dec.eigenvectors * ev.asDiagonal() *
                   dec.eigenvectors.transpose());
}

double phi_scalar(double x) {
  if (x < 0.01) {
    // Taylor series of (1+x)^{-1/2} - 1 + x/2; the closed form cancels
    // catastrophically for small x.
    return x * x *
           (3.0 / 8.0 +
            x * (-5.0 / 16.0 +
                 x * (35.0 / 128.0 +
                      x * (-63.0 / 256.0 + x * (231.0 / 1024.0)))));
  }
  return 1.0 / std::sqrt(1.0 + x) - 1.0 + 0.5 * x;
}

SymMatrix phi_remainder(const SymMatrix& s, double h) {
  if (h < 0.0) throw Error("phi_remainder requires h >= 0");
  const SpectralDecomposition dec = sym_eigen(s);
  Eigen::VectorXd ev = clamped_psd_spectrum(dec, s.mat());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = phi_scalar(h * ev(i));
  }
  return SymMatrix(dec.eigenvectors * ev.asDiagonal() *
                   dec.eigenvectors.transpose());
}

}  // namespace enkbf
