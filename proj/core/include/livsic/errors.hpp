#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace livsic {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A model parameter is outside its admissible range (e.g. LSV alpha).
class ParameterError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A value lies outside the image of an inverse branch.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Floating point results violated an internal consistency guarantee.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// A symbol word is not admissible for the Markov partition.
class CombinatorialError : public Error {
 public:
  using Error::Error;
};

/// A map or inducing domain lacks the structure an operation requires.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Equal sample points received inconsistent values of the transfer function.
class NotACoboundaryError : public Error {
 public:
  NotACoboundaryError(const std::string& what, double point, double discrepancy)
      : Error(what), point_(point), discrepancy_(discrepancy) {}
  double point() const noexcept { return point_; }
  double discrepancy() const noexcept { return discrepancy_; }

 private:
  double point_;
  double discrepancy_;
};

/// First return not reached within the iteration cap; carries the orbit so far.
class ReturnNotResolvedError : public Error {
 public:
  ReturnNotResolvedError(const std::string& what, std::vector<double> partial)
      : Error(what), partial_orbit_(std::move(partial)) {}
  const std::vector<double>& partial_orbit() const noexcept { return partial_orbit_; }

 private:
  std::vector<double> partial_orbit_;
};

}  // namespace livsic
