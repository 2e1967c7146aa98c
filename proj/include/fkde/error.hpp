#pragma once

#include <stdexcept>
#include <string>

namespace fkde {

// Argument outside the mathematical domain of an operation (x outside [0,1],
// h <= 0, negative Poisson mean, ...).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Inconsistent estimator or experiment parameters (k >= n, invalid plan,
// length mismatch, empty input).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

} // namespace fkde
