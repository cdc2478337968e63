#pragma once

#include <stdexcept>
#include <string>

namespace locrho {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or factor-dimension mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (scenario files, parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition does not hold (non-Hermitian input to an
/// eigensolver, non-PSD input to a square root, an operator that cannot
/// exist, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace locrho
