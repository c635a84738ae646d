#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stokeslab {

/// Short %g rendering for messages (std::to_string prints fixed point).
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degree, dimension, or grid mismatch between arguments.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested outside the set where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A dyadic subdivision would exceed the configured maximum generation.
class DepthError : public Error {
 public:
  using Error::Error;
};

/// A quadrature did not reach its requested error bound.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// A computation refused to run because its hypotheses are not met
/// (e.g. no disposability evidence for a singular set).
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// A sampling search ran out of budget without finding an admissible value.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A checked mathematical invariant was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace stokeslab
