#pragma once

#include <stdexcept>
#include <string>

namespace pleiopower {

/// Malformed input data, configuration, or model (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure of a numerical procedure: non-PD covariance, optimizer
/// non-convergence, unreachable root (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pleiopower
