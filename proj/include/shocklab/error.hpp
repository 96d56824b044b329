#pragma once

#include <stdexcept>
#include <string>

namespace shocklab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis gate (Lax condition, flux bound, shock strength) failed.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's domain (equal endpoints, g'' bound too large, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The time integration left its stability envelope or produced non-finite values.
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

/// Reading or writing run artifacts failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace shocklab
