#pragma once

#include <stdexcept>
#include <string>

namespace pnss {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed pulses, unnormalized states.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integration or root-finding breakdown (non-finite values, empty brackets).
class NumericsError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnss
