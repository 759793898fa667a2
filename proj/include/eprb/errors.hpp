#pragma once

#include <stdexcept>
#include <string>

namespace eprb {

// Input is missing data or has the wrong shape (missing probability, bad JSON
// layout). Distinct from a constraint check that merely fails.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Two computations that must agree did not (internal or input defect).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eprb
