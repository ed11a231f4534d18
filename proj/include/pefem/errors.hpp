#pragma once

#include <stdexcept>
#include <string>

namespace pefem {

// Invalid user input (bad mesh parameters, malformed config, ...); the CLI
// maps this to exit code 2.
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure (solver breakdown, invariant violated at runtime, ...);
// the CLI maps this to exit code 1.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pefem
