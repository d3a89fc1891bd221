#include "enkbf/diagnostics.hpp"

#include <cmath>
#include <string>

namespace enkbf {

TimeGrid TimeGrid::make(double T, double h, double h_fine) {
  if (T <= 0.0 || h <= 0.0 || h_fine <= 0.0) {
    throw Error("TimeGrid requires positive T, h, h_fine");
  }
  TimeGrid grid;
  grid.T = T;
  grid.h = h;
  grid.h_fine = h_fine;

  const double r = h / h_fine;
  grid.ratio = static_cast<int>(std::llround(r));
  if (grid.ratio < 1 || std::abs(r - grid.ratio) > 1e-9) {
    throw Error("h must be an integer multiple of h_fine, got ratio " +
                std::to_string(r));
  }
  const double fine = T / h_fine;
  grid.fine_steps = static_cast<int>(std::llround(fine));
  if (grid.fine_steps < 1 || std::abs(fine - grid.fine_steps) > 1e-9) {
    throw Error("T must be an integer multiple of h_fine");
  }
  if (grid.fine_steps % grid.ratio != 0) {
    throw Error("T must be an integer multiple of h");
  }
  grid.coarse_steps = grid.fine_steps / grid.ratio;
  return grid;
}

}  // namespace enkbf
