#pragma once

#include <stdexcept>
#include <string>

namespace enkbf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Symmetric input failed the PSD precondition (eigenvalue below -tol).
struct NotPsdError : Error {
  using Error::Error;
};

// The iterative eigen-solver did not converge; message carries a fingerprint
// of the offending matrix (dim, trace, Frobenius norm).
struct EigenSolveError : Error {
  using Error::Error;
};

// A state or ensemble member became non-finite during integration.
struct BlowUpError : Error {
  BlowUpError(std::string msg, int step_index, int member_index)
      : Error(std::move(msg)), step(step_index), member(member_index) {}
  int step;
  int member;  // -1 when not member-specific
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace enkbf
