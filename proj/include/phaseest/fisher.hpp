#pragma once

namespace phaseest {

// Closed-form Fisher information of ψ = 0 homodyne detection,
// sinh²(2r) sin²(2φ) / 8(Σ_φ²)². φ ∈ [0, π/2].
double fisher_homodyne(double r, double phi);

// Double-homodyne (coherent-state POVM) Fisher information, 4 sinh²r.
double fisher_heterodyne(double r);

// Quantum Fisher information of the squeezed vacuum, 2 sinh²(2r) = 4ΔG².
double qfi(double r);

// Single-shot quantum Cramér-Rao bound 1/qfi(r); +inf for r = 0.
double optimal_variance(double r);

// φ_H = ½ arccos(tanh 2r), the phase where homodyne saturates the QFI.
double optimal_phase(double r);

// r_opt = -½ log tan φ, inverse of optimal_phase on φ ∈ (0, π/4].
// Throws DomainError outside that range (r_opt would be negative).
double optimal_squeezing(double phi);

// Same, after reflecting φ ∈ (π/4, π/2) to π/2 - φ. +inf at φ ∈ {0, π/2}.
double optimal_squeezing_reflected(double phi);

// R(r) = M Σ_g²(r) / Var_opt = qfi(r) / F_H(r, φ*). M cancels and is only
// validated. Throws NonIdentifiable when F_H(r, φ*) = 0.
double ratio_R(double r, double phi_star, long long m = 1);

struct BoundReport {
  double r = 0.0;
  double phi = 0.0;
  double fisher_h = 0.0;
  double fisher_d = 0.0;
  double qfi = 0.0;
  double var_opt = 0.0;
  double phi_h = 0.0;
  double r_opt = 0.0;  // optimal_squeezing_reflected(phi)
};

BoundReport bounds(double r, double phi);

// Numerical cross-checks: ∫ p (∂_φ log p)² on a fixed Gauss-Legendre grid,
// derivative by central differences with step 1e-4 rad.
double numeric_fisher_homodyne(double r, double phi);
double numeric_fisher_heterodyne(double r, double phi);

}  // namespace phaseest
