#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "enkbf/noise.hpp"

using namespace enkbf;

TEST_CASE("lattice construction validates the grid") {
  CHECK_THROWS_AS(BrownianLattice(1, 1.0, 0.3, 4, 2, 1), Error);
  CHECK_THROWS_AS(BrownianLattice(1, 1.0, 1.0 / 64, 1, 2, 1), Error);
  CHECK_THROWS_AS(BrownianLattice(1, -1.0, 0.5, 4, 2, 1), Error);
  CHECK_NOTHROW(BrownianLattice(1, 1.0, 1.0 / 64, 2, 1, 1));
}

TEST_CASE("equal arguments give bit-identical lattices") {
  const BrownianLattice a(77, 2.0, 1.0 / 128, 3, 2, 2);
  const BrownianLattice b(77, 2.0, 1.0 / 128, 3, 2, 2);
  for (const Channel ch : {Channel::ModelMember, Channel::ObsMember,
                           Channel::ObsShared, Channel::ModelRef}) {
    for (int node = 1; node <= 256; node += 17) {
      CHECK(a.fine_increment(ch, 1, node) == b.fine_increment(ch, 1, node));
    }
  }
  const BrownianLattice c(78, 2.0, 1.0 / 128, 3, 2, 2);
  CHECK(a.fine_increment(Channel::ModelMember, 1, 1) !=
        c.fine_increment(Channel::ModelMember, 1, 1));
}

TEST_CASE("degenerate single-cell lattice") {
  const double T = 2.0;
  const BrownianLattice lattice(5, T, T, 2, 1, 1);
  CHECK(lattice.node_count() == 1);
  // One increment per channel with variance T: empirical check over seeds.
  const int trials = 4000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < trials; ++s) {
    const BrownianLattice l(1000 + s, T, T, 2, 1, 1);
    const double w = l.fine_increment(Channel::ModelMember, 1, 1)(0);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / trials;
  const double var = sum_sq / trials - mean * mean;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(T / trials));
  CHECK(std::abs(var - T) <= 5.0 * T * std::sqrt(2.0 / trials));
}

TEST_CASE("Gaussian moments of the fine increments") {
  const double h = 1.0 / 1024;
  const BrownianLattice lattice(11, 1.0, h, 16, 3, 2);
  const int draws = 100000;
  double sum = 0.0, sum_sq = 0.0;
  int count = 0;
  for (int node = 1; node <= lattice.node_count(); ++node) {
    for (int member = 1; member <= 16 && count < draws; ++member) {
      const Eigen::VectorXd w =
          lattice.fine_increment(Channel::ModelMember, member, node);
      for (int j = 0; j < 3 && count < draws; ++j) {
        sum += w(j);
        sum_sq += w(j) * w(j);
        ++count;
      }
    }
  }
  const double mean = sum / count;
  const double var = sum_sq / count - mean * mean;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(h / count));
  CHECK(std::abs(var - h) <= 5.0 * h * std::sqrt(2.0 / count));
}

TEST_CASE("coarse 1-cell aggregation is the fine increment") {
  const BrownianLattice lattice(3, 1.0, 1.0 / 64, 2, 2, 1);
  for (int node = 1; node <= 64; node += 7) {
    CHECK(lattice.coarse_increment(Channel::ModelMember, 1, node, 1) ==
          lattice.fine_increment(Channel::ModelMember, 1, node));
  }
}

TEST_CASE("coarse aggregation equals the ascending fine sum bit-exactly") {
  const BrownianLattice lattice(9, 1.0, 1.0 / 256, 2, 2, 2);
  for (const int ratio : {4, 16, 64}) {
    const int coarse_cells = 256 / ratio;
    for (int k = 1; k <= coarse_cells; ++k) {
      Eigen::VectorXd manual = Eigen::VectorXd::Zero(2);
      for (int j = (k - 1) * ratio + 1; j <= k * ratio; ++j) {
        manual += lattice.fine_increment(Channel::ObsMember, 2, j);
      }
      CHECK(manual ==
            lattice.coarse_increment(Channel::ObsMember, 2, k, ratio));
    }
  }
  // Whole-horizon aggregation telescopes to the full ascending sum.
  Eigen::VectorXd total = Eigen::VectorXd::Zero(2);
  for (int j = 1; j <= 256; ++j) {
    total += lattice.fine_increment(Channel::ObsMember, 2, j);
  }
  CHECK(total == lattice.coarse_increment(Channel::ObsMember, 2, 1, 256));
}

TEST_CASE("coarse increment variance scales with the ratio") {
  const double h = 1.0 / 64;
  const int ratio = 8;
  const int trials = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < trials; ++s) {
    const BrownianLattice lattice(5000 + s, 1.0, h, 2, 1, 1);
    const double w =
        lattice.coarse_increment(Channel::ModelMember, 1, 1, ratio)(0);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / trials;
  const double var = sum_sq / trials - mean * mean;
  const double expected = ratio * h;
  CHECK(std::abs(var - expected) <=
        3.0 * expected * std::sqrt(2.0 / trials));
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(expected / trials));
}

TEST_CASE("distinct channels are empirically uncorrelated") {
  const double h = 1.0 / 1024;
  const BrownianLattice lattice(13, 1.0, h, 8, 1, 1);
  const int n = lattice.node_count();

  const auto corr = [&](Channel c1, int m1, Channel c2, int m2) {
    double sum = 0.0;
    int count = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const BrownianLattice l(9000 + rep, 1.0, h, 8, 1, 1);
      for (int node = 1; node <= n; ++node) {
        sum += l.fine_increment(c1, m1, node)(0) *
               l.fine_increment(c2, m2, node)(0);
        ++count;
      }
    }
    // Under independence each product has mean 0, sd h.
    return sum / count / h * std::sqrt(static_cast<double>(count));
  };

  CHECK(std::abs(corr(Channel::ModelMember, 1, Channel::ModelMember, 2)) <=
        4.0);
  CHECK(std::abs(corr(Channel::ModelMember, 1, Channel::ObsMember, 1)) <=
        4.0);
  CHECK(std::abs(corr(Channel::ObsShared, 0, Channel::ObsMember, 1)) <= 4.0);
  CHECK(std::abs(corr(Channel::ModelRef, 0, Channel::ModelMember, 1)) <= 4.0);
}

TEST_CASE("out-of-range queries throw") {
  const BrownianLattice lattice(1, 1.0, 1.0 / 16, 2, 1, 1);
  CHECK_THROWS_AS(lattice.fine_increment(Channel::ModelMember, 1, 0), Error);
  CHECK_THROWS_AS(lattice.fine_increment(Channel::ModelMember, 1, 17), Error);
  CHECK_THROWS_AS(lattice.coarse_increment(Channel::ModelMember, 1, 3, 8),
                  Error);
  CHECK_THROWS_AS(lattice.coarse_increment(Channel::ModelMember, 1, 1, 0),
                  Error);
}
