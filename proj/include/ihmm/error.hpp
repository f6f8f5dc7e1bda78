#pragma once

#include <stdexcept>
#include <string>

namespace ihmm {

// Invalid distribution or model parameter (non-positive concentration, bad
// shape/rate, all-zero categorical weights, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Observation outside the support of the emission family.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model components disagree with each other (K mismatch, trajectory refers to
// an inactive state, counts out of shape).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Arithmetic breakdown: every candidate has zero mass.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ihmm
