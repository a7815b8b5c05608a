#pragma once

#include <stdexcept>
#include <string>

namespace rydfrag {

// Invalid input to a library call (bad site count, unattainable sector, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configurable resource cap (fragment dimension, full-space size) was hit.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown: degenerate denominators, non-convergence, norm loss.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydfrag
