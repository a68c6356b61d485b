#pragma once

#include <stdexcept>
#include <string>

namespace nslwr {

// Input outside the domain of a diagram function (density outside [0, K],
// spacing below jam spacing, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid arguments to an operation (nonpositive step sizes, k1 > K, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unsupported model/scheme combination or malformed configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A trajectory measurement could not be made (too few crossing vehicles).
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The analytic Riemann oracle refuses non-concave diagrams.
class UnsupportedDiagram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A string-stability run collided and cannot be interpreted.
class ExperimentInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nslwr
