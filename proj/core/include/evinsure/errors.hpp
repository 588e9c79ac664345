#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evinsure {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The premium would be unbounded: the EVCS cannot price its way to break-even.
class PricingError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Inputs are malformed: dimension mismatches, missing transitions,
// reducible chains, disconnected networks.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double error_estimate)
      : Error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

// An optimization model has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Iterative scheme ran out of iterations; carries the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const noexcept { return trace_; }

 private:
  std::vector<double> trace_;
};

// Input file could not be parsed; the message names file and row.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace evinsure
