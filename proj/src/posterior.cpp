#include "phaseest/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "format.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/fisher.hpp"

namespace phaseest {
namespace {

constexpr double kWindowSlack = 1e-12;

double trapezoid_weight(std::size_t i, std::size_t n, double step) {
  return (i == 0 || i + 1 == n) ? 0.5 * step : step;
}

void check_grid_size(int grid_size) {
  if (grid_size < kMinGridSize) {
    throw DomainError("grid_size must be >= " + std::to_string(kMinGridSize));
  }
}

}  // namespace

PosteriorGrid PosteriorGrid::from_log_density(double lower, double upper,
                                              std::vector<double> log_density) {
  if (!(upper > lower)) throw DomainError("posterior window must have upper > lower");
  if (log_density.size() < 2) throw DomainError("posterior grid needs at least 2 points");

  PosteriorGrid g;
  const std::size_t n = log_density.size();
  g.lower_ = lower;
  g.upper_ = upper;
  g.step_ = (upper - lower) / static_cast<double>(n - 1);
  g.phis_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.phis_[i] = lower + g.step_ * static_cast<double>(i);
  g.phis_.back() = upper;
  g.log_density_ = std::move(log_density);

  const auto [lo_it, hi_it] = std::minmax_element(g.log_density_.begin(), g.log_density_.end());
  const double peak = *hi_it;
  if (!std::isfinite(peak)) throw DomainError("posterior log-density has no finite maximum");

  // Max-shift before exponentiating so that M up to 1e6 neither overflows nor underflows.
  g.density_.resize(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g.density_[i] = std::exp(g.log_density_[i] - peak);
    z += trapezoid_weight(i, n, g.step_) * g.density_[i];
  }
  for (double& d : g.density_) d /= z;
  g.log_norm_ = peak + std::log(z);

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += trapezoid_weight(i, n, g.step_) * g.phis_[i] * g.density_[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = g.phis_[i] - mean;
    var += trapezoid_weight(i, n, g.step_) * d * d * g.density_[i];
  }
  g.mean_ = mean;
  g.variance_ = std::max(var, 0.0);

  g.flat_ = (peak - *lo_it) <= 1e-12 * std::max(1.0, std::abs(peak));
  if (g.flat_) {
    g.mode_ = 0.5 * (lower + upper);
    return g;
  }
  // First index attaining the maximum, then a parabola through the log-density.
  const auto k = static_cast<std::size_t>(hi_it - g.log_density_.begin());
  g.mode_ = g.phis_[k];
  if (k > 0 && k + 1 < n) {
    const double lm = g.log_density_[k - 1];
    const double l0 = g.log_density_[k];
    const double lp = g.log_density_[k + 1];
    const double curvature = lm - 2.0 * l0 + lp;
    if (curvature < 0.0) {
      const double delta = 0.5 * (lm - lp) / curvature;
      g.mode_ = g.phis_[k] + std::clamp(delta, -0.5, 0.5) * g.step_;
    }
  }
  return g;
}

double PosteriorGrid::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    s += trapezoid_weight(i, density_.size(), step_) * density_[i];
  }
  return s;
}

PosteriorGrid PosteriorGrid::translated(double offset) const {
  PosteriorGrid g = *this;
  for (double& p : g.phis_) p += offset;
  g.lower_ += offset;
  g.upper_ += offset;
  g.mean_ += offset;
  g.mode_ += offset;
  return g;
}

PosteriorGrid posterior_from_terms(std::span<const LikelihoodTerm> terms, int grid_size,
                                   double lower, double upper) {
  check_grid_size(grid_size);
  detail::require_finite(lower, "window lower bound");
  detail::require_finite(upper, "window upper bound");
  if (!(upper > lower)) throw DomainError("posterior window must have upper > lower");

  for (const auto& t : terms) {
    detail::require_nonnegative(t.frame.r, "r");
    if (t.count < 0) throw DomainError("likelihood term count must be >= 0");
    detail::require_nonnegative(t.sum_sq, "sum_sq");
    for (double edge : {lower, upper}) {
      const double e = t.frame.effective(edge);
      if (e < -kWindowSlack || e > kHalfPi + kWindowSlack) {
        throw DomainError("frame maps the posterior window outside [0, pi/2]");
      }
    }
  }

  const auto n = static_cast<std::size_t>(grid_size);
  const double step = (upper - lower) / static_cast<double>(n - 1);
  const double log_prior = -std::log(upper - lower);
  std::vector<double> log_density(n, log_prior);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = (i + 1 == n) ? upper : lower + step * static_cast<double>(i);
    for (const auto& t : terms) {
      if (t.count == 0) continue;
      const double var = quadrature_variance(t.frame.r, t.frame.effective(phi));
      log_density[i] += -0.5 * static_cast<double>(t.count) * std::log(2.0 * kPi * var) -
                        t.sum_sq / (2.0 * var);
    }
  }
  return PosteriorGrid::from_log_density(lower, upper, std::move(log_density));
}

PosteriorGrid posterior_from_statistics(std::int64_t count, double sum_sq, double r,
                                        int grid_size) {
  const LikelihoodTerm term{.frame = {.r = r}, .count = count, .sum_sq = sum_sq};
  return posterior_from_terms({&term, 1}, grid_size);
}

PosteriorGrid posterior_from_batch(const HomodyneBatch& batch, double r, int grid_size) {
  return posterior_from_statistics(batch.count(), batch.sum_sq(), r, grid_size);
}

PosteriorGrid asymptotic_posterior(double r, double phi_star, std::int64_t m, int grid_size) {
  detail::require_phase_in_prior(phi_star, "phi_star");
  if (phi_star == 0.0 || phi_star == kHalfPi) {
    throw DomainError("asymptotic_posterior needs phi_star strictly inside (0, pi/2)");
  }
  if (m < 1) throw DomainError("asymptotic_posterior needs m >= 1");
  const double expected_sum_sq = static_cast<double>(m) * homodyne_variance(r, phi_star);
  return posterior_from_statistics(m, expected_sum_sq, r, grid_size);
}

double gaussian_approx_variance(double r, double phi_star, std::int64_t m) {
  if (m < 1) throw DomainError("gaussian_approx_variance needs m >= 1");
  const double f = fisher_homodyne(r, phi_star);
  if (!(f > 0.0)) {
    throw NonIdentifiable("homodyne Fisher information vanishes at phi* = " +
                          std::to_string(phi_star) + ", r = " + std::to_string(r));
  }
  return 1.0 / (static_cast<double>(m) * f);
}

double gamma_ratio(double r, double phi_star, std::int64_t m, int grid_size) {
  const double sigma_g2 = gaussian_approx_variance(r, phi_star, m);
  return asymptotic_posterior(r, phi_star, m, grid_size).variance() / sigma_g2;
}

double skewness(const PosteriorGrid& grid) {
  if (!(grid.variance() > 0.0)) throw DomainError("skewness needs a positive posterior variance");
  return std::abs(grid.mean() - grid.mode()) / std::sqrt(grid.variance());
}

void write_posterior_csv(const PosteriorGrid& grid, std::ostream& out) {
  out << "phi,density\n";
  const auto phis = grid.phis();
  const auto dens = grid.density();
  for (std::size_t i = 0; i < phis.size(); ++i) {
    out << detail::format_double(phis[i]) << ',' << detail::format_double(dens[i]) << '\n';
  }
}

}  // namespace phaseest
