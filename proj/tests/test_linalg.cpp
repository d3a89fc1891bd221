#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "doctest.h"
#include "enkbf/linalg.hpp"
#include "test_support.hpp"

using namespace enkbf;
using enkbf_test::Rng;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SymMatrix rank_one_pair() {
  // Eigenvalues {0, 2}: the 2x2 matrix [[1,-1],[-1,1]].
  Eigen::MatrixXd m(2, 2);
  m << 1.0, -1.0, -1.0, 1.0;
  return SymMatrix(m);
}

// Independent scalar quadrature of phi(x) through the substitution t = u^2,
// composite Simpson refined until two resolutions agree.
double phi_by_quadrature(double x) {
  const auto integrand = [x](double u) {
    const double v = u * u * x;
    return std::exp(-u * u) * (std::expm1(-v) + v);
  };
  const double upper = 8.0;
  const auto simpson = [&](int panels) {
    const double width = upper / panels;
    double sum = integrand(0.0) + integrand(upper);
    for (int i = 1; i < panels; ++i) {
      sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * width);
    }
    return sum * width / 3.0;
  };
  double prev = simpson(512), cur = simpson(1024);
  for (int panels = 2048; std::abs(cur - prev) > 1e-13 && panels <= 1 << 16;
       panels *= 2) {
    prev = cur;
    cur = simpson(panels);
  }
  return 2.0 / std::sqrt(3.14159265358979323846) * cur;
}

}  // namespace

TEST_CASE("sym_eigen identity and diagonal cases") {
  const SpectralDecomposition id3 = sym_eigen(SymMatrix::Identity(3));
  CHECK(id3.eigenvalues.isApproxToConstant(1.0, 1e-14));
  CHECK((id3.eigenvectors.transpose() * id3.eigenvectors -
         Eigen::MatrixXd::Identity(3, 3))
            .norm() <= 1e-10 * 3);

  const SpectralDecomposition d49 = sym_eigen(SymMatrix(diag2(4.0, 9.0)));
  CHECK(d49.eigenvalues(0) == doctest::Approx(9.0));
  CHECK(d49.eigenvalues(1) == doctest::Approx(4.0));
}

TEST_CASE("sym_eigen reconstructs random PSD matrices") {
  Rng rng(1);
  for (int trial = 0; trial < 25; ++trial) {
    const SymMatrix a = rng.psd(5);
    const SpectralDecomposition dec = sym_eigen(a);
    CHECK((dec.reconstruct() - a.mat()).norm() <= 1e-10 * a.mat().norm());
    CHECK((dec.eigenvectors.transpose() * dec.eigenvectors -
           Eigen::MatrixXd::Identity(5, 5))
              .norm() <= 1e-10 * 5);
    for (int i = 1; i < 5; ++i) {
      CHECK(dec.eigenvalues(i - 1) >= dec.eigenvalues(i));
    }
  }
}

TEST_CASE("sqrt_psd analytic and squaring-oracle cases") {
  CHECK((sqrt_psd(SymMatrix(diag2(4.0, 9.0))).mat() - diag2(2.0, 3.0))
            .norm() <= 1e-12);
  CHECK(sqrt_psd(SymMatrix::Zero(3)).mat().norm() == 0.0);

  Rng rng(2);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd b = rng.matrix(4, 4);
    const SymMatrix a(b.transpose() * b);
    const Eigen::MatrixXd root = sqrt_psd(a).mat();
    CHECK((root * root - a.mat()).norm() <= 1e-8 * (1.0 + a.mat().norm()));
    CHECK((root - root.transpose()).norm() == 0.0);
  }
}

TEST_CASE("sqrt_psd scaling property") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix a = rng.psd(rng.uniform_int(1, 6));
    const double c = 0.1 + 3.0 * rng.uniform();
    const SymMatrix scaled(c * c * a.mat());
    CHECK((sqrt_psd(scaled).mat() - c * sqrt_psd(a).mat()).norm() <=
          1e-10 * (1.0 + sqrt_psd(a).mat().norm()));
  }
}

TEST_CASE("sqrt_psd rejects indefinite input, clamps round-off") {
  CHECK_THROWS_AS(sqrt_psd(SymMatrix(diag2(1.0, -1.0))), NotPsdError);
  const SymMatrix nearly(diag2(1.0, -1e-12));
  CHECK_NOTHROW(sqrt_psd(nearly));
  CHECK(sqrt_psd(nearly).mat()(1, 1) == 0.0);
}

TEST_CASE("pinv_sqrt_psd analytic cases and Moore-Penrose oracle") {
  CHECK((pinv_sqrt_psd(SymMatrix(diag2(4.0, 0.0))).mat() - diag2(0.5, 0.0))
            .norm() <= 1e-12);
  CHECK((pinv_sqrt_psd(SymMatrix::Identity(4)).mat() -
         Eigen::MatrixXd::Identity(4, 4))
            .norm() <= 1e-12);

  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd b = rng.matrix(4, 2);
    const SymMatrix a(b * b.transpose());  // rank 2
    const Eigen::MatrixXd r = pinv_sqrt_psd(a).mat();
    const Eigen::MatrixXd s = sqrt_psd(a).mat();
    CHECK((r * s * r - r).norm() <= 1e-8 * (1.0 + r.norm()));
    CHECK((s * r * s - s).norm() <= 1e-8 * (1.0 + s.norm()));
    CHECK((r * s - (r * s).transpose()).norm() <= 1e-10);
  }
}

TEST_CASE("inv_sqrt_shifted identity, closed form and inversion oracle") {
  const SymMatrix pair = rank_one_pair();
  CHECK((inv_sqrt_shifted(pair, 0.0).mat() -
         Eigen::MatrixXd::Identity(2, 2))
            .norm() <= 1e-14);

  const SpectralDecomposition dec = sym_eigen(inv_sqrt_shifted(pair, 0.1));
  CHECK(dec.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) ==
        doctest::Approx(1.0 / std::sqrt(1.2)).epsilon(1e-12));

  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = rng.uniform_int(1, 6);
    const SymMatrix s = rng.psd(dim);
    const double h = rng.uniform();
    const Eigen::MatrixXd r = inv_sqrt_shifted(s, h).mat();
    const Eigen::MatrixXd target =
        Eigen::MatrixXd::Identity(dim, dim) + h * s.mat();
    CHECK((r * r * target - Eigen::MatrixXd::Identity(dim, dim)).norm() <=
          1e-8 * dim);
    const SpectralDecomposition rd = sym_eigen(SymMatrix(r));
    CHECK(rd.eigenvalues(0) <= 1.0 + 1e-12);
    CHECK(rd.eigenvalues(dim - 1) > 0.0);
  }
}

TEST_CASE("phi_remainder trivial and scalar closed-form cases") {
  CHECK(phi_remainder(rank_one_pair(), 0.0).mat().norm() == 0.0);
  CHECK(phi_scalar(1.0) ==
        doctest::Approx(std::sqrt(0.5) - 0.5).epsilon(1e-12));
  CHECK(phi_scalar(0.0) == 0.0);
}

TEST_CASE("phi closed form matches quadrature of the integral form") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const double x = 4.0 * std::max(rng.uniform(), 0.01);
    const double closed = phi_scalar(x);
    const double quad = phi_by_quadrature(x);
    CHECK(std::abs(closed - quad) <= 1e-8 * std::abs(quad));
  }
}

TEST_CASE("phi series branch is continuous at the crossover") {
  for (const double x : {0.009, 0.0099, 0.0101, 0.011}) {
    const double closed = 1.0 / std::sqrt(1.0 + x) - 1.0 + 0.5 * x;
    CHECK(phi_scalar(x) == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("spectral identity (1+x)^{-1/2} = 1 - x/2 + phi(x)") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = rng.uniform_int(1, 6);
    const SymMatrix s = rng.psd(dim);
    const double h = rng.uniform();
    const Eigen::MatrixXd lhs = inv_sqrt_shifted(s, h).mat();
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(dim, dim) -
                                0.5 * h * s.mat() +
                                phi_remainder(s, h).mat();
    CHECK((lhs - rhs).norm() <= 1e-10 * dim);
  }
}

TEST_CASE("pinv_sqrt_psd matches the Gaussian integral representation") {
  // sqrt(P^{-1}) = 1/sqrt(pi) int t^{-1/2} e^{-tP} dt. The quadrature path
  // uses the Pade matrix exponential, so the two routes share nothing.
  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    const int dim = rng.uniform_int(1, 3);
    const SymMatrix p = rng.pd(dim, 0.4);

    const auto integrand = [&](double u) -> Eigen::MatrixXd {
      return (-u * u * p.mat()).exp();
    };
    const double upper = 9.0;
    const auto simpson = [&](int panels) -> Eigen::MatrixXd {
      const double width = upper / panels;
      Eigen::MatrixXd sum = integrand(0.0) + integrand(upper);
      for (int i = 1; i < panels; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * width);
      }
      return Eigen::MatrixXd(sum * width / 3.0);
    };
    const Eigen::MatrixXd quad =
        2.0 / std::sqrt(3.14159265358979323846) * simpson(4096);
    const Eigen::MatrixXd direct = pinv_sqrt_psd(p).mat();
    CHECK((quad - direct).norm() <= 1e-6 * direct.norm());
  }
}

TEST_CASE("SymMatrix enforces square symmetric storage") {
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd::Zero(2, 3)), Error);
  Eigen::MatrixXd skewed(2, 2);
  skewed << 1.0, 2.0, 0.0, 1.0;
  const SymMatrix s(skewed);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(1.0));
}
