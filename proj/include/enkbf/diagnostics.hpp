#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "enkbf/errors.hpp"

namespace enkbf {

constexpr double kNever = std::numeric_limits<double>::infinity();

/// Dyadic two-level grid: coarse step h = ratio * h_fine on [0, T]. The
/// grid maps eta (cell start time), eta_plus (cell end), nu (cell start
/// index) and nu_plus are realized as index arithmetic on fine nodes.
struct TimeGrid {
  double T = 0.0;
  double h = 0.0;
  double h_fine = 0.0;
  int ratio = 0;         // h / h_fine
  int coarse_steps = 0;  // T / h
  int fine_steps = 0;    // T / h_fine

  static TimeGrid make(double T, double h, double h_fine);

  double coarse_time(int k) const { return k * h; }
  double fine_time(int j) const { return j * h_fine; }

  // For t in [t_{k-1}, t_k): nu(t) = k-1. Fine node j lies at time j*h_fine.
  int nu_of_fine(int j) const { return j / ratio; }
  int nu_plus_of_fine(int j) const { return j / ratio + 1; }
  double eta_of_fine(int j) const { return coarse_time(nu_of_fine(j)); }
  double eta_plus_of_fine(int j) const {
    return coarse_time(nu_plus_of_fine(j));
  }
};

/// First-passage monitor: records the first time a monitored quantity
/// strictly exceeds the threshold.
struct StoppingMonitor {
  double threshold = kNever;
  double first_hit = kNever;

  void observe(double t, double value) {
    if (first_hit == kNever && value > threshold) first_hit = t;
  }
  bool hit() const { return first_hit != kNever; }
};

/// One sample of the gain-difference estimate: the three deviations
/// Delta = ||K_k - K_t||, ||Khat_k - K_t/2||, ||K_k - Khat_k - K_t/2|| and
/// the bracket h tr(Pf)^2 + (tr(Pf)^{1/2} + tr(P)^{1/2}) (sum ||Xf - X||^2)^{1/2}
/// they are measured against.
struct GainDiffSample {
  double time = 0.0;
  double delta_full = 0.0;
  double delta_hat = 0.0;
  double delta_cross = 0.0;
  double bracket = 0.0;

  double max_ratio() const {
    if (bracket <= 0.0) return 0.0;  // degenerate 0/0 cells are skipped
    return std::max({delta_full, delta_hat, delta_cross}) / bracket;
  }
};

/// Error series of one coupled run, recorded at the coarse nodes.
struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> coupling_error;  // sum_i ||X^a_nu(t) - X_t||^2
  std::vector<double> accuracy_error;  // sum_i ||X^ref_t - member||^2
  double sup_coupling = 0.0;
  double sup_accuracy = 0.0;
};

}  // namespace enkbf
