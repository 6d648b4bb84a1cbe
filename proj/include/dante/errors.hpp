#pragma once

#include <stdexcept>
#include <string>

namespace dante {

// Bad or inconsistent input data (malformed CSV, duplicate keys, bad weights).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite densities, failed initialisation, and similar numerical trouble.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration supplied by the caller.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dante
