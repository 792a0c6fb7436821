#ifndef VSLAM_ERRORS_HPP
#define VSLAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vslam {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, arguments or state. The CLI maps this family to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Config-file syntax or schema error, carrying file/line context.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& origin, int line, const std::string& message)
      : ValidationError(origin + ":" + std::to_string(line) + ": " + message) {}
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numeric failure at run time. The CLI maps this family to exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateVector : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularMatrix : public NumericError {
 public:
  using NumericError::NumericError;
};

class LandmarkAtOrigin : public NumericError {
 public:
  using NumericError::NumericError;
};

class OriginLandmark : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateReference : public NumericError {
 public:
  using NumericError::NumericError;
};

class RiccatiBlowup : public NumericError {
 public:
  using NumericError::NumericError;
};

class InsufficientHistory : public NumericError {
 public:
  using NumericError::NumericError;
};

class EmptyHistory : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vslam

#endif  // VSLAM_ERRORS_HPP
