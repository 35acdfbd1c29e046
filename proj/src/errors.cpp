#include "phaseest/errors.hpp"

#include <cmath>

#include "phaseest/constants.hpp"

namespace phaseest::detail {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

void require_nonnegative(double value, const char* name) {
  require_finite(value, name);
  if (value < 0.0) {
    throw DomainError(std::string(name) + " must be >= 0, got " + std::to_string(value));
  }
}

void require_phase_in_prior(double phi, const char* name) {
  require_finite(phi, name);
  if (phi < 0.0 || phi > kHalfPi) {
    throw DomainError(std::string(name) + " must lie in [0, pi/2], got " + std::to_string(phi));
  }
}

}  // namespace phaseest::detail
