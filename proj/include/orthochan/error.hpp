#pragma once

#include <stdexcept>
#include <string>

namespace orthochan {

// Base of every error the library throws on a broken precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments out of range, size mismatches, malformed inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An enumeration or dense-memory cap would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A matrix that should be a quantum state is not one.
class InvalidStateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace orthochan
