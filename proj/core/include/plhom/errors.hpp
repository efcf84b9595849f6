#pragma once

#include <stdexcept>
#include <string>

namespace plhom {

/// Thrown when an ODE integration or eigenvalue search cannot make progress
/// (step-size underflow, non-finite state, bracket failure, iteration cap).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace plhom
