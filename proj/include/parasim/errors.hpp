#pragma once

#include <stdexcept>
#include <string>

namespace parasim {

/// A value violates a documented invariant (bad normalization, negative mass,
/// malformed population).  Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The caller asked for something that is not meaningful: mismatched shapes,
/// colliding axes, out-of-range shifts.  Maps to CLI exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Conditioning on an agent whose interaction marginal is zero.
class DegenerateConditioningError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// KL divergence requested where the first argument puts mass on a cell the
/// second argument does not cover.
class AbsoluteContinuityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// File-system failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parasim
