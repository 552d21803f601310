#pragma once

#include <stdexcept>
#include <string>

namespace ajd {

/// Base class for every failure reported by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is degenerate: singular system, all-zero matrix set,
/// or a column lying in the common null space of the set.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel exhausted its sweep/pass budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace ajd
