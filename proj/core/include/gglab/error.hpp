#pragma once

#include <stdexcept>
#include <string>

namespace gglab {

// Base of all library errors. Subclasses let callers (the CLI in particular)
// tell bad input from numerical trouble.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gglab
