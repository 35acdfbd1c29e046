#pragma once

#include "phaseest/constants.hpp"

namespace phaseest {

// Squeezed-displaced vacuum D(α)S(ξ)|0⟩ with ξ = r·exp(-2i·varphi).
struct Probe {
  double r = 0.0;
  double varphi = kHalfPi;
  double alpha_re = 0.0;
  double alpha_im = 0.0;

  // Mean photon number sinh²r + |α|².
  double energy() const;
};

// Squeezed vacuum in the canonical frame (varphi = π/2, α = 0).
Probe squeezed_vacuum(double r);

// Single-mode covariance, vacuum = 1/4 on the diagonal.
struct CovarianceMatrix2 {
  double s11 = kVacuumVariance;
  double s12 = 0.0;
  double s22 = kVacuumVariance;

  double det() const { return s11 * s22 - s12 * s12; }
  double trace() const { return s11 + s22; }
};

// σ_0 = ¼ diag(e^{-2r}, e^{2r}). Only the canonical frame is accepted;
// other squeezing phases are reached by translating φ.
CovarianceMatrix2 probe_covariance(const Probe& probe);

// Covariance after the phase shift U(φ) = exp(-iφ a†a):
//   s11 = ¼(e^{2r}cos²φ + e^{-2r}sin²φ)
//   s22 = ¼(e^{-2r}cos²φ + e^{2r}sin²φ)
//   s12 = ¼ sinh(2r) sin(2φ)
// The entries are ordered so that s22 is the ψ = 0 homodyne variance; this
// is R_φ·swap(σ_0)·R_φᵀ with the axes of σ_0 exchanged.
CovarianceMatrix2 phase_shifted_covariance(const Probe& probe, double phi);

// Photon-number variance ΔG² of the probe, for any α and varphi.
// With α = 0 this is ½ sinh²(2r); the quantum Fisher information is 4ΔG².
double energy_fluctuation(const Probe& probe);

}  // namespace phaseest
