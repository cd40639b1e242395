#pragma once

#include <stdexcept>
#include <string>

namespace lplab {

/// Argument outside the domain of an operation (bad index, bad exponent,
/// violated parameter constraint).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite or otherwise malformed sample data.
class InvalidDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field-level hypothesis (divergence-free, zero-mean) does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration stopped early (CFL, non-finite state).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lplab
