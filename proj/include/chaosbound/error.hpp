#pragma once

#include <stdexcept>
#include <string>

namespace chaosbound {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidOrder : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidContraction : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SpaceMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Series or integral that does not converge for the requested parameters.
class DivergenceError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The requested computation exceeds a configured size or operation budget.
class ComplexityError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure could not reach the requested accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaosbound
