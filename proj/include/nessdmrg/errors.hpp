#pragma once

#include <stdexcept>
#include <string>

namespace nessdmrg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown or duplicated index label.
class LabelError : public Error {
 public:
  using Error::Error;
};

/// Incompatible extents, lengths or physical dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A parameter outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a breakdown inside an iterative method.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nessdmrg
