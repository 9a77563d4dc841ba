#pragma once

#include <stdexcept>
#include <string>

namespace hybridsort {

/// Malformed or out-of-contract input (files, configs, detections, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not proceed, e.g. a singular innovation covariance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hybridsort
