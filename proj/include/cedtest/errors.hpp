#pragma once

#include <stdexcept>
#include <string>

namespace cedtest {

// Base of every error thrown by the library. Callers that only need to
// distinguish "bad input" from "the data cannot support the request" can
// catch the two intermediate classes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: wrong shapes, non-finite values, invalid options.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Failures that depend on the data values rather than on the call shape.
class DataError : public Error {
 public:
  using Error::Error;
};

// Constant column, identical points, and similar zero-spread inputs.
class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

// Estimated covariate density vanishes at the evaluation point.
class EvaluationPointError : public DataError {
 public:
  using DataError::DataError;
};

// Local bootstrap found no positive kernel weight around an observation.
class ResampleError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cedtest
