#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace paving {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Block count or block dimensions disagree with the shape, or two operands
/// live in different algebras.
class MalformedElementError : public Error {
 public:
  using Error::Error;
};

/// Non-finite entries or a failed numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its domain (non-Hermitian input to a
/// spectral routine, an invalid partition, an empty unitary list, ...).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A requested object cannot be realized at this dimension / trace
/// granularity. `nearest()` carries the closest realizable value when known.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, std::optional<double> nearest = std::nullopt)
      : Error(what), nearest_(nearest) {}
  std::optional<double> nearest() const noexcept { return nearest_; }

 private:
  std::optional<double> nearest_;
};

/// An inclusion specification violates its bookkeeping equations.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A configured size budget would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace paving
