#pragma once

#include <stdexcept>
#include <string>

namespace cadsvm {

// Raised when an input file or dataset is missing, malformed, or violates a
// documented shape requirement. Mapped to exit code 2 by the CLI.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an optimizer cannot produce a usable iterate (singular KKT
// system after all regularization escalations, NaN divergence). Mapped to
// exit code 3 by the CLI.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cadsvm
