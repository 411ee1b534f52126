#pragma once

#include <stdexcept>
#include <string>

namespace hfield {

// Invalid configuration value (Hurst index out of range, q too large, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inputs whose dimensions disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A coordinate that is not a grid node (no interpolation is ever done).
class SnapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested feature outside the supported desk-scale range.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense factorization of a covariance matrix failed.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature did not reach its tolerance; carries the best estimate.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double achieved)
      : std::runtime_error(what), estimate_(estimate), achieved_(achieved) {}
  double estimate() const noexcept { return estimate_; }
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double estimate_;
  double achieved_;
};

// Wave equation posed outside its existence region.
class ExistenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Field file errors. Each failure mode has its own type.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};
class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};
class NanPayloadError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace hfield
