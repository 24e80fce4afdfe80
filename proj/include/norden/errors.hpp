#pragma once

#include <stdexcept>
#include <string>

namespace norden {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation outside a function's declared domain [0, t_max).
struct DomainError : Error {
  double t;
  DomainError(double t_, const std::string& what) : Error(what), t(t_) {}
};

// A denominator required to be nonzero vanished (or nearly so) at some t.
struct DenominatorError : Error {
  double t;
  DenominatorError(double t_, const std::string& what) : Error(what), t(t_) {}
};

// Expression syntax / identifier / arity problems, with byte offset.
struct ParseError : Error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& what) : Error(what), offset(off) {}
};

// Metric (or other matrix) not invertible at the requested point.
struct DegenerateError : Error {
  using Error::Error;
};

// Bad run configuration (CLI layer maps this to exit code 64).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace norden
