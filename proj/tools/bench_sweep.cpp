// Times the convergence sweep on the serial reference path and on the
// OpenMP pool, and checks that both produce the same report.
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "enkbf/experiments.hpp"

using namespace enkbf;

namespace {

ConvergenceReport run_sweep(int threads) {
  const FilteringProblem problem =
      builtin_problem("ornstein-uhlenbeck", {{"d", 2.0}});
  StudySetup setup;
  setup.T = 1.0;
  setup.h_fine = 1.0 / 2048.0;
  setup.M = 10;
  setup.x0 = Eigen::VectorXd::Constant(2, 1.0);
  setup.init_spread = 1.0;
  setup.threads = threads;
  const std::vector<double> h_list = {1.0 / 16, 1.0 / 32, 1.0 / 64,
                                      1.0 / 128};
  return convergence_study(problem, Variant::Etkf, h_list, 24, 7, setup);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  const ConvergenceReport serial = run_sweep(1);
  const double serial_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const ConvergenceReport parallel = run_sweep(0);
  const double parallel_s = seconds_since(t0);

  bool identical = serial.rows.size() == parallel.rows.size() &&
                   serial.slope == parallel.slope;
  for (std::size_t i = 0; identical && i < serial.rows.size(); ++i) {
    identical = serial.rows[i].sup_error == parallel.rows[i].sup_error &&
                serial.rows[i].sup_error_stopped ==
                    parallel.rows[i].sup_error_stopped;
  }

  std::cout << "serial:   " << serial_s << " s\n"
            << "parallel: " << parallel_s << " s\n"
            << "speedup:  " << serial_s / parallel_s << "x\n"
            << "results identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
