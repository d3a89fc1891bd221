#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "enkbf/errors.hpp"

namespace enkbf {

/// Noise channels of the lattice. Each (channel, member) pair is an
/// independent Gaussian increment stream.
enum class Channel : std::uint32_t {
  ModelMember = 1,  // W^(i), d-dimensional, one stream per ensemble member
  ObsMember = 2,    // V^(i), p-dimensional, one stream per ensemble member
  ObsShared = 3,    // V, p-dimensional, the measurement-device noise
  ModelRef = 4,     // W driving the reference trajectory, d-dimensional
  InitDraw = 5,     // unit normals for initial-ensemble construction
};

/// Seeded Brownian increments on a fine grid of T/h_fine cells, with exact
/// aggregation to any coarser step that is an integer multiple of h_fine.
///
/// Generation is counter-based: the stream key is derived from
/// (seed, channel, member, node) by iterating the SplitMix64 finalizer, and
/// component j of a node's increment consumes outputs 2j, 2j+1 of that
/// keyed stream through a Box-Muller transform. Nothing is stored; any node
/// of any channel can be generated independently and concurrently, and a
/// coarse increment is the ascending-order sum of its fine cells.
class BrownianLattice {
 public:
  BrownianLattice(std::uint64_t seed, double T, double h_fine, int M, int d,
                  int p);

  std::uint64_t seed() const { return seed_; }
  double horizon() const { return T_; }
  double h_fine() const { return h_fine_; }
  int node_count() const { return nodes_; }
  int ensemble_size() const { return M_; }
  int state_dim() const { return d_; }
  int obs_dim() const { return p_; }

  /// Unit-variance normal vector for (channel, member, node); dimension is
  /// the channel's dimension. node is 1-based (node k covers cell
  /// (t_{k-1}, t_k]).
  Eigen::VectorXd standard_normal(Channel ch, int member, int node) const;

  /// Fine Brownian increment ~ N(0, h_fine * Id).
  Eigen::VectorXd fine_increment(Channel ch, int member, int node) const;

  /// Sum of the fine increments of coarse cell `coarse_node` at step
  /// ratio*h_fine, i.e. fine cells (coarse_node-1)*ratio+1 .. coarse_node*ratio.
  Eigen::VectorXd coarse_increment(Channel ch, int member, int coarse_node,
                                   int ratio) const;

  /// All-member fine increments as a (dim x M) block, member i in column i.
  Eigen::MatrixXd fine_block(Channel ch, int node) const;

  /// All-member coarse increments as a (dim x M) block.
  Eigen::MatrixXd coarse_block(Channel ch, int coarse_node, int ratio) const;

  int channel_dim(Channel ch) const;

 private:
  void check_node(int node) const;

  std::uint64_t seed_;
  double T_;
  double h_fine_;
  int M_, d_, p_;
  int nodes_;
};

/// SplitMix64 finalizer; also used to derive per-seed-index lattice seeds.
std::uint64_t mix64(std::uint64_t z);

}  // namespace enkbf
