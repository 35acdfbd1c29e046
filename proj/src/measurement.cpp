#include "phaseest/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phaseest/constants.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/rng.hpp"

namespace phaseest {
namespace {

// Summed in ascending order so the result does not depend on sample order.
double sum_of_squares(const std::vector<QuadratureSample>& samples) {
  std::vector<double> squares;
  squares.reserve(samples.size());
  for (const auto& s : samples) squares.push_back(s.x * s.x);
  std::sort(squares.begin(), squares.end());
  return std::accumulate(squares.begin(), squares.end(), 0.0);
}

}  // namespace

HomodyneBatch::HomodyneBatch(std::vector<QuadratureSample> samples)
    : samples_(std::move(samples)), sum_sq_(sum_of_squares(samples_)) {
  for (const auto& s : samples_) detail::require_finite(s.x, "homodyne sample");
}

HomodyneBatch HomodyneBatch::from_values(std::span<const double> xs) {
  std::vector<QuadratureSample> samples;
  samples.reserve(xs.size());
  for (double x : xs) samples.push_back({x});
  return HomodyneBatch(std::move(samples));
}

HomodyneBatch HomodyneBatch::prefix(std::int64_t n) const {
  const auto k = static_cast<std::size_t>(std::clamp<std::int64_t>(n, 0, count()));
  return HomodyneBatch({samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(k)});
}

HomodyneBatch HomodyneBatch::suffix_from(std::int64_t n) const {
  const auto k = static_cast<std::size_t>(std::clamp<std::int64_t>(n, 0, count()));
  return HomodyneBatch({samples_.begin() + static_cast<std::ptrdiff_t>(k), samples_.end()});
}

double homodyne_variance(double r, double phi) {
  detail::require_phase_in_prior(phi, "phi");
  return quadrature_variance(r, phi);
}

double quadrature_variance(double r, double phi) {
  detail::require_nonnegative(r, "r");
  detail::require_finite(phi, "phi");
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return kVacuumVariance * (std::exp(-2.0 * r) * c * c + std::exp(2.0 * r) * s * s);
}

double homodyne_logpdf(double x, double r, double phi) {
  const double var = homodyne_variance(r, phi);
  return -0.5 * std::log(2.0 * kPi * var) - x * x / (2.0 * var);
}

HomodyneBatch sample_gaussian(double variance, std::int64_t m, std::uint64_t seed) {
  if (m < 0) throw DomainError("sample count must be >= 0");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("sampling variance must be positive and finite");
  }
  NormalStream stream(seed);
  const double sd = std::sqrt(variance);
  std::vector<QuadratureSample> samples(static_cast<std::size_t>(m));
  for (auto& s : samples) s.x = sd * stream.next();
  return HomodyneBatch(std::move(samples));
}

HomodyneBatch sample_homodyne(double r, double phi, std::int64_t m, std::uint64_t seed) {
  return sample_gaussian(homodyne_variance(r, phi), m, seed);
}

double heterodyne_logpdf(const HeterodynePoint& z, double r, double phi) {
  detail::require_nonnegative(r, "r");
  detail::require_finite(phi, "phi");
  const double t = std::tanh(r);
  const double c = std::cos(2.0 * phi);
  const double s = std::sin(2.0 * phi);
  const double x = z.z_re;
  const double y = z.z_im;
  // Re[z² e^{2iφ}] = (x² − y²)cos2φ − 2xy sin2φ
  const double re_term = (x * x - y * y) * c - 2.0 * x * y * s;
  return -(x * x + y * y) - t * re_term - std::log(kPi * std::cosh(r));
}

}  // namespace phaseest
