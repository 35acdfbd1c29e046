#include "phaseest/probe.hpp"

#include <cmath>

#include "phaseest/errors.hpp"

namespace phaseest {

double Probe::energy() const {
  const double s = std::sinh(r);
  return s * s + alpha_re * alpha_re + alpha_im * alpha_im;
}

Probe squeezed_vacuum(double r) {
  detail::require_nonnegative(r, "r");
  return Probe{.r = r};
}

CovarianceMatrix2 probe_covariance(const Probe& probe) {
  detail::require_nonnegative(probe.r, "r");
  if (probe.varphi != kHalfPi || probe.alpha_re != 0.0 || probe.alpha_im != 0.0) {
    throw DomainError("probe_covariance expects the canonical frame varphi = pi/2, alpha = 0");
  }
  return {.s11 = kVacuumVariance * std::exp(-2.0 * probe.r),
          .s12 = 0.0,
          .s22 = kVacuumVariance * std::exp(2.0 * probe.r)};
}

CovarianceMatrix2 phase_shifted_covariance(const Probe& probe, double phi) {
  const auto base = probe_covariance(probe);
  detail::require_phase_in_prior(phi, "phi");
  const double c2 = std::cos(phi) * std::cos(phi);
  const double s2 = std::sin(phi) * std::sin(phi);
  // base.s11 = e^{-2r}/4, base.s22 = e^{2r}/4
  return {.s11 = base.s22 * c2 + base.s11 * s2,
          .s12 = kVacuumVariance * std::sinh(2.0 * probe.r) * std::sin(2.0 * phi),
          .s22 = base.s11 * c2 + base.s22 * s2};
}

double energy_fluctuation(const Probe& probe) {
  detail::require_nonnegative(probe.r, "r");
  detail::require_finite(probe.varphi, "varphi");
  detail::require_finite(probe.alpha_re, "alpha_re");
  detail::require_finite(probe.alpha_im, "alpha_im");
  const double c = std::cos(probe.varphi);
  const double s = std::sin(probe.varphi);
  // Displacement projected on the anti-squeezed and squeezed axes.
  const double along = probe.alpha_re * c - probe.alpha_im * s;
  const double across = probe.alpha_re * s + probe.alpha_im * c;
  const double sh = std::sinh(2.0 * probe.r);
  return 0.5 * sh * sh + std::exp(2.0 * probe.r) * along * along +
         std::exp(-2.0 * probe.r) * across * across;
}

}  // namespace phaseest
