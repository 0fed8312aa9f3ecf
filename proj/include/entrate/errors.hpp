#pragma once

#include <stdexcept>
#include <string>

namespace entrate {

// Bad or inconsistent input data: malformed sequences, out-of-range
// parameters, schema violations. The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a valid answer for otherwise
// well-formed input. The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a stationary distribution is requested for a chain whose
// transition graph is not strongly connected (or has unvisited rows).
class ReducibleMatrixError : public NumericError {
 public:
  explicit ReducibleMatrixError(const std::string& detail)
      : NumericError("reducible transition matrix: " + detail) {}
};

}  // namespace entrate
