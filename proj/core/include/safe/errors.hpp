#pragma once

#include <stdexcept>

namespace safe {

// Bad inputs: malformed files, schema violations, contract misuse.
// Mapped to exit code 1 by the CLI.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: degenerate conditionals, improper-posterior guards,
// diverging fits. Mapped to exit code 2 by the CLI.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace safe
