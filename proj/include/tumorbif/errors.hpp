#pragma once

#include <stdexcept>
#include <string>

namespace tumorbif {

// Base class for all library errors. Subclasses mark the failure category so
// the CLI can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the operation (negative psi, sigma
// outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Model parameters violate an admissibility condition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to converge or detected an inconsistency.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Newton met a singular Jacobian: the point collides with another
// bifurcation point or a fold.
class FoldError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Newton diverged from the predictor; a smaller continuation step may help.
class StepSizeError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Index outside the tabulated range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A quotient with a vanishing denominator was requested.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Configuration or usage problem (CLI, config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tumorbif
