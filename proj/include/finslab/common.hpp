#ifndef FINSLAB_COMMON_HPP
#define FINSLAB_COMMON_HPP

#include <stdexcept>
#include <string>

namespace finslab {

// Error taxonomy. Everything thrown by the library derives from Error so
// callers can catch the whole family at the tool boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input to an operation (zero tangent vector, point outside chart, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Metric data violates the family axioms (non-PD fundamental tensor,
// Randers one-form with alpha-norm >= 1, singular coefficient matrix).
class InvalidMetricError : public Error {
 public:
  using Error::Error;
};

// An iteration failed to converge; message carries the residual.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Estimate/configuration parameters violate a stated hypothesis.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Requested check does not apply to the given data (e.g. Harnack with a != 0).
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

// Configuration or expression syntax error; message carries the position.
class ParseError : public Error {
 public:
  using Error::Error;
};

constexpr int kMaxDim = 3;  // spatial dimensions supported by the dispatch layer

}  // namespace finslab

#endif
