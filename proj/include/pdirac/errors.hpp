#pragma once

#include <stdexcept>
#include <string>

namespace pdirac {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different Fourier grids or have incompatible sizes.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (field file, configuration).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The two smallest singular values of a fiber are too close to isolate a
/// one-dimensional cokernel.
class DegenerateCokernel : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An exponential gauge factor would leave the safe dynamic range.
class OverflowGuard : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Parameters are individually valid but cannot be used together.
class InadmissibleParameters : public Error {
 public:
  using Error::Error;
};

class SupportViolation : public InadmissibleParameters {
 public:
  using InadmissibleParameters::InadmissibleParameters;
};

class SingularWeight : public InadmissibleParameters {
 public:
  using InadmissibleParameters::InadmissibleParameters;
};

/// Quadrature grid does not resolve the oscillatory phase.
class ResolutionError : public InadmissibleParameters {
 public:
  using InadmissibleParameters::InadmissibleParameters;
};

}  // namespace pdirac
