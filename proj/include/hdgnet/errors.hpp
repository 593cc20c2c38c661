#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdgnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed network configuration (syntax, missing keys, bad types).
struct ConfigError : Error {
  using Error::Error;
};

/// Arguments that do not fit together (dimension mismatch, bad mesh size, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

/// Linear solver breakdown during time stepping.
struct SolverError : Error {
  SolverError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_index(step) {}
  std::size_t step_index;
};

/// Exact solution cannot be evaluated for the given network.
struct OracleUnavailable : Error {
  using Error::Error;
};

}  // namespace hdgnet
