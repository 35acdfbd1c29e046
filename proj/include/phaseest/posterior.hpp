#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "phaseest/constants.hpp"
#include "phaseest/measurement.hpp"

namespace phaseest {

inline constexpr int kDefaultGridSize = 2048;
inline constexpr int kMinGridSize = 64;

// Maps the phase being estimated to the phase the detector sees:
// effective(φ) = sign·φ + shift. The identity frame is the plain setup;
// a shift models a retuned local-oscillator/squeezing phase and
// sign = -1, shift = π/2 models the reflected frame (squeezing -r).
struct HomodyneFrame {
  double r = 0.0;
  double sign = 1.0;
  double shift = 0.0;

  double effective(double phi) const { return sign * phi + shift; }
};

// Gaussian homodyne data recorded in one frame, reduced to (M, Σx²).
struct LikelihoodTerm {
  HomodyneFrame frame;
  std::int64_t count = 0;
  double sum_sq = 0.0;
};

// Posterior density of φ on a uniform grid over [lower, upper] with a flat
// prior on that interval. log_density holds log prior + Σ log-likelihood
// (unnormalized); log_norm is its log-integral, so density = exp(log_density
// - log_norm) integrates to one under the trapezoidal rule.
class PosteriorGrid {
 public:
  static PosteriorGrid from_log_density(double lower, double upper, std::vector<double> log_density);

  std::span<const double> phis() const { return phis_; }
  std::span<const double> log_density() const { return log_density_; }
  std::span<const double> density() const { return density_; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double step() const { return step_; }
  std::size_t size() const { return phis_.size(); }

  double log_norm() const { return log_norm_; }
  double mean() const { return mean_; }
  double mode() const { return mode_; }
  double variance() const { return variance_; }
  // True when the density is constant; mode is then the interval midpoint.
  bool flat() const { return flat_; }

  // Trapezoidal integral of the normalized density (≈ 1).
  double integral() const;

  // Same grid moved by offset (φ → φ + offset); density values unchanged.
  PosteriorGrid translated(double offset) const;

 private:
  PosteriorGrid() = default;

  std::vector<double> phis_;
  std::vector<double> log_density_;
  std::vector<double> density_;
  double lower_ = 0.0;
  double upper_ = kHalfPi;
  double step_ = 0.0;
  double log_norm_ = 0.0;
  double mean_ = 0.0;
  double mode_ = 0.0;
  double variance_ = 0.0;
  bool flat_ = false;
};

// General form: product of per-frame homodyne likelihoods on [lower, upper].
// Every frame must map the whole window into [0, π/2].
PosteriorGrid posterior_from_terms(std::span<const LikelihoodTerm> terms, int grid_size,
                                   double lower = 0.0, double upper = kHalfPi);

PosteriorGrid posterior_from_statistics(std::int64_t count, double sum_sq, double r,
                                        int grid_size = kDefaultGridSize);

PosteriorGrid posterior_from_batch(const HomodyneBatch& batch, double r,
                                   int grid_size = kDefaultGridSize);

// Large-M limit: Σx² replaced by its expectation M·Σ_{φ*}².
PosteriorGrid asymptotic_posterior(double r, double phi_star, std::int64_t m,
                                   int grid_size = kDefaultGridSize);

// Σ_g² = 1 / (M F_H(φ*)).
double gaussian_approx_variance(double r, double phi_star, std::int64_t m);

// Γ = variance(asymptotic_posterior) / Σ_g².
double gamma_ratio(double r, double phi_star, std::int64_t m, int grid_size = kDefaultGridSize);

// Pearson skewness |mean - mode| / sqrt(variance).
double skewness(const PosteriorGrid& grid);

// "phi,density" header then one row per grid point.
void write_posterior_csv(const PosteriorGrid& grid, std::ostream& out);

}  // namespace phaseest
