#pragma once

#include <stdexcept>
#include <string>

namespace arplab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A pivot fell below the elimination tolerance.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

// An iterative scheme ran out of its iteration budget.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// A theory precondition does not hold (e.g. zeta*n <= rho(B^2)).
// Carries the measured quantities so callers can report them.
class PreconditionViolated : public Error {
 public:
  PreconditionViolated(const std::string& msg, double lhs = 0.0, double rhs = 0.0)
      : Error(msg), lhs_(lhs), rhs_(rhs) {}
  double lhs() const { return lhs_; }
  double rhs() const { return rhs_; }

 private:
  double lhs_;
  double rhs_;
};

class UnknownToken : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

class DegenerateSupport : public Error {
 public:
  using Error::Error;
};

class EmptySequenceSet : public Error {
 public:
  using Error::Error;
};

class SequenceTooShort : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InvalidGamma : public Error {
 public:
  using Error::Error;
};

class InvalidDelta : public Error {
 public:
  using Error::Error;
};

class MalformedMarkers : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid UTF-8 input; carries the byte offset of the offending byte.
class EncodingError : public Error {
 public:
  EncodingError(const std::string& msg, std::size_t byte_offset)
      : Error(msg), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

// API misuse that is not one of the named domain errors above
// (non-finite input, out-of-range parameter, shape mismatch).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace arplab
