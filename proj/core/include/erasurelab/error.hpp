#pragma once

#include <stdexcept>
#include <string>

namespace erasurelab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The rate schedule yields fewer than two codewords (or more than the cap).
class InfeasibleSchedule : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation would exceed its enumeration budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// An iterative solver or a search failed to reach its target.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace erasurelab
