#pragma once

#include <stdexcept>
#include <string>

namespace dpc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter outside the domain of an operation (non-positive power, unsorted fading, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Operation requirement not met by otherwise valid input (e.g. a1 != 0 for the subset lemma).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Bound evaluated outside the regime where it is stated.
class RegimeViolation : public Error {
 public:
  using Error::Error;
};

/// Singular covariance block where a density is required.
class DegenerateDistribution : public Error {
 public:
  using Error::Error;
};

/// Conditioning block is (numerically) singular.
class DegenerateConditioning : public DegenerateDistribution {
 public:
  using DegenerateDistribution::DegenerateDistribution;
};

/// Objective diverges at the requested point.
class Divergence : public Error {
 public:
  using Error::Error;
};

}  // namespace dpc
