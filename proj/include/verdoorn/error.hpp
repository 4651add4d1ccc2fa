#pragma once

#include <stdexcept>
#include <string>

namespace verdoorn {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (CSV contents, panel invariants).
class DataError : public Error {
  using Error::Error;
};

// Mathematical domain violations (invalid degrees of freedom, probabilities
// outside their open interval, negative quadratic forms).
class DomainError : public Error {
  using Error::Error;
};

// Estimator preconditions not met: degenerate regressors, too few rows,
// too few entities, instrument counts exceeding usable rows.
class EstimationError : public Error {
  using Error::Error;
};

// Bad run configuration (CLI flags, study files, schema mappings).
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace verdoorn
