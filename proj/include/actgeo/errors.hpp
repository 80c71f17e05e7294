#pragma once

#include <stdexcept>
#include <string>

namespace actgeo {

// Malformed or inconsistent input data (stores, manifests, outcome files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that is undefined on the given input (zero variance, rank 0, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace actgeo
