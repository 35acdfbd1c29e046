#pragma once

#include <stdexcept>
#include <string>

namespace phaseest {

// A precondition on a physical or statistical argument was violated
// (negative squeezing, phase outside the prior support, non-finite input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The data carry no information about the phase at the requested point,
// e.g. the homodyne Fisher information vanishes at φ ∈ {0, π/2}.
class NonIdentifiable : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

void require_finite(double value, const char* name);
void require_nonnegative(double value, const char* name);
void require_phase_in_prior(double phi, const char* name);

}  // namespace detail
}  // namespace phaseest
