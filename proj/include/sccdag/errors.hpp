#pragma once

#include <stdexcept>
#include <string>

namespace sccdag {

/// Precondition or input-validation failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular systems, rank-deficient covariances, eigensolver failures,
/// missing admissible permutations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sccdag
