#include "phaseest/fisher.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "phaseest/constants.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/measurement.hpp"

namespace phaseest {
namespace {

constexpr double kFdStep = 1e-4;
constexpr int kPanels = 48;
constexpr int kPanels2d = 16;
using Rule = boost::math::quadrature::gauss<double, 30>;

// Composite Gauss-Legendre on [a, b].
template <class F>
double integrate(F&& f, double a, double b, int panels = kPanels) {
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    total += Rule::integrate(f, lo, lo + width);
  }
  return total;
}

}  // namespace

double fisher_homodyne(double r, double phi) {
  const double var = homodyne_variance(r, phi);
  // Exact zeros at the prior edges (sin(π) does not round to 0).
  if (phi == 0.0 || phi == kHalfPi) return 0.0;
  const double num = std::sinh(2.0 * r) * std::sin(2.0 * phi);
  return num * num / (8.0 * var * var);
}

double fisher_heterodyne(double r) {
  detail::require_nonnegative(r, "r");
  const double s = std::sinh(r);
  return 4.0 * s * s;
}

double qfi(double r) {
  detail::require_nonnegative(r, "r");
  const double s = std::sinh(2.0 * r);
  return 2.0 * s * s;
}

double optimal_variance(double r) {
  const double h = qfi(r);
  return h > 0.0 ? 1.0 / h : std::numeric_limits<double>::infinity();
}

double optimal_phase(double r) {
  detail::require_nonnegative(r, "r");
  return 0.5 * std::acos(std::tanh(2.0 * r));
}

double optimal_squeezing(double phi) {
  detail::require_finite(phi, "phi");
  if (!(phi > 0.0) || phi > kQuarterPi) {
    throw DomainError("optimal_squeezing needs phi in (0, pi/4], got " + std::to_string(phi));
  }
  // tan(π/4) rounds to 1 - ε; pin the exact endpoint.
  if (phi == kQuarterPi) return 0.0;
  return -0.5 * std::log(std::tan(phi));
}

double optimal_squeezing_reflected(double phi) {
  detail::require_phase_in_prior(phi, "phi");
  if (phi == 0.0 || phi == kHalfPi) return std::numeric_limits<double>::infinity();
  return optimal_squeezing(phi <= kQuarterPi ? phi : kHalfPi - phi);
}

double ratio_R(double r, double phi_star, long long m) {
  if (m < 1) throw DomainError("ratio_R needs m >= 1");
  // Validates φ* ∈ (0, π/4] as the range where an optimal squeezing exists.
  (void)optimal_squeezing(phi_star);
  const double f = fisher_homodyne(r, phi_star);
  if (!(f > 0.0)) {
    throw NonIdentifiable("homodyne Fisher information vanishes at r = " + std::to_string(r) +
                          ", phi* = " + std::to_string(phi_star));
  }
  return qfi(r) / f;
}

BoundReport bounds(double r, double phi) {
  BoundReport b;
  b.r = r;
  b.phi = phi;
  b.fisher_h = fisher_homodyne(r, phi);
  b.fisher_d = fisher_heterodyne(r);
  b.qfi = qfi(r);
  b.var_opt = optimal_variance(r);
  b.phi_h = optimal_phase(r);
  b.r_opt = optimal_squeezing_reflected(phi);
  return b;
}

double numeric_fisher_homodyne(double r, double phi) {
  detail::require_phase_in_prior(phi, "phi");
  const auto logp = [r](double x, double p) {
    const double var = quadrature_variance(r, p);
    return -0.5 * std::log(2.0 * kPi * var) - x * x / (2.0 * var);
  };
  const double half_width = 8.0 * std::sqrt(quadrature_variance(r, phi));
  const auto integrand = [&](double x) {
    const double score = (logp(x, phi + kFdStep) - logp(x, phi - kFdStep)) / (2.0 * kFdStep);
    return std::exp(logp(x, phi)) * score * score;
  };
  return integrate(integrand, -half_width, half_width);
}

double numeric_fisher_heterodyne(double r, double phi) {
  detail::require_nonnegative(r, "r");
  // Widest axis of exp(-vᵀAv) has eigenvalue 1 - tanh r.
  const double sigma_max = std::sqrt(0.5 / (1.0 - std::tanh(r)));
  const double half_width = 8.0 * sigma_max;
  const auto inner = [&](double y) {
    const auto integrand = [&](double x) {
      const HeterodynePoint z{x, y};
      const double score =
          (heterodyne_logpdf(z, r, phi + kFdStep) - heterodyne_logpdf(z, r, phi - kFdStep)) /
          (2.0 * kFdStep);
      return std::exp(heterodyne_logpdf(z, r, phi)) * score * score;
    };
    return integrate(integrand, -half_width, half_width, kPanels2d);
  };
  return integrate(inner, -half_width, half_width, kPanels2d);
}

}  // namespace phaseest
