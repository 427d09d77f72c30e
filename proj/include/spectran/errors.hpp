#pragma once

#include <stdexcept>
#include <string>

namespace spectran {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// usage/config -> 2, data -> 3, numerical -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or dimension mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

// A documented precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Malformed or non-finite input data (files, matrices, logs).
struct DataError : Error {
  using Error::Error;
};

// Invalid run configuration or incompatible checkpoint.
struct ConfigError : Error {
  using Error::Error;
};

// Singular input, NaN loss, or other numerical failure.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace spectran
