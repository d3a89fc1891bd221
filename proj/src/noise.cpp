#include "enkbf/noise.hpp"

#include <cmath>
#include <numbers>

namespace enkbf {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t stream_key(std::uint64_t seed, Channel ch, int member,
                         int node) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ static_cast<std::uint64_t>(ch));
  k = mix64(k ^ static_cast<std::uint64_t>(member));
  k = mix64(k ^ static_cast<std::uint64_t>(node));
  return k;
}

double to_open_unit(std::uint64_t bits) {
  // 53-bit mantissa, low bit forced so the value is strictly positive.
  return static_cast<double>((bits >> 11) | 1ULL) * 0x1.0p-53;
}

double gaussian(std::uint64_t key, int component) {
  const std::uint64_t a =
      mix64(key + 2 * static_cast<std::uint64_t>(component));
  const std::uint64_t b =
      mix64(key + 2 * static_cast<std::uint64_t>(component) + 1);
  const double u1 = to_open_unit(a);
  const double u2 = to_open_unit(b);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

BrownianLattice::BrownianLattice(std::uint64_t seed, double T, double h_fine,
                                 int M, int d, int p)
    : seed_(seed), T_(T), h_fine_(h_fine), M_(M), d_(d), p_(p) {
  if (T <= 0.0 || h_fine <= 0.0) {
    throw Error("BrownianLattice requires T > 0 and h_fine > 0");
  }
  const double ratio = T / h_fine;
  nodes_ = static_cast<int>(std::llround(ratio));
  if (nodes_ < 1 || std::abs(ratio - nodes_) > 1e-9) {
    throw Error("T/h_fine must be a positive integer, got " +
                std::to_string(ratio));
  }
  if (M < 2) throw Error("ensemble size M must be at least 2");
  if (d < 1 || p < 1) throw Error("state and observation dims must be >= 1");
}

int BrownianLattice::channel_dim(Channel ch) const {
  switch (ch) {
    case Channel::ModelMember:
    case Channel::ModelRef:
    case Channel::InitDraw:
      return d_;
    case Channel::ObsMember:
    case Channel::ObsShared:
      return p_;
  }
  throw Error("unknown channel");
}

void BrownianLattice::check_node(int node) const {
  if (node < 1 || node > nodes_) {
    throw Error("lattice node " + std::to_string(node) + " out of range [1, " +
                std::to_string(nodes_) + "]");
  }
}

Eigen::VectorXd BrownianLattice::standard_normal(Channel ch, int member,
                                                 int node) const {
  const int dim = channel_dim(ch);
  const std::uint64_t key = stream_key(seed_, ch, member, node);
  Eigen::VectorXd z(dim);
  for (int j = 0; j < dim; ++j) z(j) = gaussian(key, j);
  return z;
}

Eigen::VectorXd BrownianLattice::fine_increment(Channel ch, int member,
                                                int node) const {
  check_node(node);
  return std::sqrt(h_fine_) * standard_normal(ch, member, node);
}

Eigen::VectorXd BrownianLattice::coarse_increment(Channel ch, int member,
                                                  int coarse_node,
                                                  int ratio) const {
  if (ratio < 1) throw Error("coarse ratio must be >= 1");
  const int last = coarse_node * ratio;
  if (coarse_node < 1 || last > nodes_) {
    throw Error("coarse node " + std::to_string(coarse_node) +
                " at ratio " + std::to_string(ratio) + " out of range");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(channel_dim(ch));
  for (int node = (coarse_node - 1) * ratio + 1; node <= last; ++node) {
    sum += fine_increment(ch, member, node);
  }
  return sum;
}

Eigen::MatrixXd BrownianLattice::fine_block(Channel ch, int node) const {
  Eigen::MatrixXd block(channel_dim(ch), M_);
  for (int i = 0; i < M_; ++i) block.col(i) = fine_increment(ch, i + 1, node);
  return block;
}

Eigen::MatrixXd BrownianLattice::coarse_block(Channel ch, int coarse_node,
                                              int ratio) const {
  Eigen::MatrixXd block(channel_dim(ch), M_);
  for (int i = 0; i < M_; ++i) {
    block.col(i) = coarse_increment(ch, i + 1, coarse_node, ratio);
  }
  return block;
}

}  // namespace enkbf
