#pragma once

#include <stdexcept>
#include <string>

namespace lnmix {

// File/CSV content that cannot be parsed (bad number, wrong field count, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally well-formed input that violates the data contract
// (missing element, duplicate row, non-monotone Z, non-positive volume, ...).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lookup of a name that does not exist (property, label, ...).
struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated call precondition (empty input, out-of-range argument, ...).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure that survives the built-in recovery attempts
// (factorization failure after jitter, residual check failure, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown key, bad value, missing file).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lnmix
