#pragma once

#include <stdexcept>
#include <string>

namespace ccp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad syntax, missing key, wrong value type).
struct ParseError : Error {
  using Error::Error;
};

/// Structurally invalid data (dimension mismatch, non-finite entry, bad argument).
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

/// Numerical breakdown (singular basis, failed factorization, division guard).
struct NumericalError : Error {
  using Error::Error;
};

struct IterationLimitError : NumericalError {
  using NumericalError::NumericalError;
};

/// A work budget was exceeded (enumeration explosion, resampling cap).
struct BudgetError : Error {
  using Error::Error;
};

/// Function evaluated outside its domain (log layer at phi <= -1).
struct DomainError : Error {
  using Error::Error;
};

}  // namespace ccp
