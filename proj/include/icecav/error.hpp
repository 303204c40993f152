#pragma once

#include <stdexcept>
#include <string>

namespace icecav {

/// Base of all library errors. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 2; }
};

/// A query fell outside the domain of the object it was made against.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent parameters, malformed files, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An action was requested that the state does not admit.
class ActionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace icecav
