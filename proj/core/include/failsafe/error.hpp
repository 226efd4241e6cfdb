#pragma once

#include <stdexcept>
#include <string>

namespace failsafe {

// Argument outside an operation's domain (k < 1, alpha outside (0, 0.5), p
// outside (0, 1), non-finite input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Folded N_R density evaluated at its integrable singularity n_r = -k.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A quantity underflowed past the point where a result is meaningful, e.g. the
// survival mass of a truncated normal evaluated absurdly deep in the tail.
class OverflowError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Rejection sampling kept no draws.
class EmptyBatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace failsafe
