#pragma once

#include <stdexcept>
#include <string>

namespace simcal {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed, empty, or out-of-range input data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The computation itself is undefined on the given data
// (zero variance, rank-deficient design, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace simcal
