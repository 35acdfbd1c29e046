#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace phaseest {

struct QuadratureSample {
  double x = 0.0;
};

// Homodyne record plus its sufficient statistic Σx².
class HomodyneBatch {
 public:
  HomodyneBatch() = default;
  explicit HomodyneBatch(std::vector<QuadratureSample> samples);

  static HomodyneBatch from_values(std::span<const double> xs);

  const std::vector<QuadratureSample>& samples() const { return samples_; }
  double sum_sq() const { return sum_sq_; }
  std::int64_t count() const { return static_cast<std::int64_t>(samples_.size()); }

  // First n samples as a new batch (n clamped to count()).
  HomodyneBatch prefix(std::int64_t n) const;
  HomodyneBatch suffix_from(std::int64_t n) const;

 private:
  std::vector<QuadratureSample> samples_;
  double sum_sq_ = 0.0;
};

struct HeterodynePoint {
  double z_re = 0.0;
  double z_im = 0.0;
};

// Σ_φ² = ¼[e^{-2r}cos²φ + e^{2r}sin²φ], the ψ = 0 quadrature variance.
double homodyne_variance(double r, double phi);

// Σ² for an arbitrary real phase (π-periodic, even in φ). Sampling in a
// retuned frame can land outside [0, π/2] when the rough estimate is off.
double quadrature_variance(double r, double phi);

double homodyne_logpdf(double x, double r, double phi);

// m i.i.d. draws from N(0, Σ_φ²); identical output for identical seeds.
HomodyneBatch sample_homodyne(double r, double phi, std::int64_t m, std::uint64_t seed);

// Same, with the variance given directly (used for retuned frames).
HomodyneBatch sample_gaussian(double variance, std::int64_t m, std::uint64_t seed);

// log p_D(z|φ) = -|z|² - tanh r·Re[z² e^{2iφ}] - log(π cosh r).
double heterodyne_logpdf(const HeterodynePoint& z, double r, double phi);

}  // namespace phaseest
