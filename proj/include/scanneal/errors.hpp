#ifndef SCANNEAL_ERRORS_HPP
#define SCANNEAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scanneal {

// Bad arguments, malformed instance data, inconsistent configuration.
// The CLI maps this to exit code 2.
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// An iterative method failed to converge or a computation left its
// supported range. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure; messages always carry the offending path.
// The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scanneal

#endif
