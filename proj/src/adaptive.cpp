#include "phaseest/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "phaseest/errors.hpp"
#include "phaseest/fisher.hpp"
#include "phaseest/rng.hpp"

namespace phaseest {
namespace {

constexpr std::int64_t kMinAdaptiveSamples = 16;

void require_interior_rough(double rough) {
  detail::require_finite(rough, "rough estimate");
  if (!(rough > 0.0) || !(rough < kHalfPi)) {
    throw NonIdentifiable("rough estimate must lie strictly inside (0, pi/2), got " +
                          std::to_string(rough));
  }
}

std::int64_t isqrt(std::int64_t v) {
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::None: return "none";
    case Scheme::SqueezeRetune: return "squeeze";
    case Scheme::PhaseRetune: return "phase";
  }
  return "none";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "none") return Scheme::None;
  if (name == "squeeze") return Scheme::SqueezeRetune;
  if (name == "phase") return Scheme::PhaseRetune;
  return std::nullopt;
}

std::int64_t default_rough_count(std::int64_t m) {
  if (m < 0) throw DomainError("sample budget must be >= 0");
  // ⌊3√M⌋ = ⌊√(9M)⌋
  return isqrt(9 * m);
}

RoughEstimate rough_estimate(const HomodyneBatch& prefix, double r, int grid_size) {
  const auto post = posterior_from_batch(prefix, r, grid_size);
  return {.value = post.mode(), .variance = post.variance(), .flat = post.flat()};
}

HomodyneFrame TwoStepPlan::stage2_frame(double stage1_r) const {
  switch (scheme) {
    case Scheme::None: return {.r = stage1_r};
    case Scheme::SqueezeRetune:
      return reflected ? HomodyneFrame{.r = retuned_r, .sign = -1.0, .shift = kHalfPi}
                       : HomodyneFrame{.r = retuned_r};
    case Scheme::PhaseRetune: return {.r = stage1_r, .shift = phase_offset};
  }
  return {.r = stage1_r};
}

double TwoStepPlan::window_lower() const {
  return scheme == Scheme::PhaseRetune ? std::max(0.0, -phase_offset) : 0.0;
}

double TwoStepPlan::window_upper() const {
  return scheme == Scheme::PhaseRetune ? std::min(kHalfPi, kHalfPi - phase_offset) : kHalfPi;
}

TwoStepPlan plan_squeeze_retune(double rough) {
  require_interior_rough(rough);
  TwoStepPlan plan;
  plan.scheme = Scheme::SqueezeRetune;
  plan.rough_estimate = rough;
  plan.reflected = rough > kQuarterPi;
  plan.retuned_r = optimal_squeezing(plan.reflected ? kHalfPi - rough : rough);
  if (plan.retuned_r > kMaxRetunedSqueezing) {
    plan.retuned_r = kMaxRetunedSqueezing;
    plan.clamped = true;
  }
  return plan;
}

TwoStepPlan plan_phase_retune(double rough, double r, double spread) {
  require_interior_rough(rough);
  detail::require_nonnegative(r, "r");
  if (!(r > 0.0)) throw DomainError("phase retuning needs r > 0");
  detail::require_nonnegative(spread, "spread");

  TwoStepPlan plan;
  plan.scheme = Scheme::PhaseRetune;
  plan.rough_estimate = rough;
  const double nominal = optimal_phase(r) - rough;
  plan.phase_offset = nominal;
  if (spread > 0.0) {
    const double plausible_lo = std::max(0.0, rough - spread);
    const double plausible_hi = std::min(kHalfPi, rough + spread);
    plan.phase_offset = std::clamp(nominal, -plausible_lo, kHalfPi - plausible_hi);
    plan.clamped = plan.phase_offset != nominal;
  }
  return plan;
}

TwoStepOutcome run_two_step(const TwoStepOptions& o) {
  detail::require_nonnegative(o.r, "r");
  detail::require_phase_in_prior(o.phi_star, "phi_star");
  if (o.m < 0) throw DomainError("m must be >= 0");
  if (o.scheme != Scheme::None && o.m < kMinAdaptiveSamples) {
    throw DomainError("adaptive schemes need m >= 16");
  }

  TwoStepOutcome out;
  const std::uint64_t seed1 = derive_seed(o.seed, 1, 0);

  if (o.scheme == Scheme::None) {
    const auto batch = sample_homodyne(o.r, o.phi_star, o.m, seed1);
    const auto post = posterior_from_batch(batch, o.r, o.grid_size);
    out.mean = out.stage2_mean = post.mean();
    out.variance = out.stage2_variance = post.variance();
    out.mode = post.mode();
    out.stage2_count = o.m;
    out.stage2_sum_sq = batch.sum_sq();
    out.rough_flat = post.flat();
    return out;
  }

  const std::int64_t n_rough = o.n_rough.value_or(default_rough_count(o.m));
  if (n_rough < 1 || n_rough >= o.m) {
    throw DomainError("rough-stage count must satisfy 1 <= n_rough < m");
  }

  const auto stage1 = sample_homodyne(o.r, o.phi_star, n_rough, seed1);
  const auto rough = rough_estimate(stage1, o.r, o.grid_size);
  out.rough_flat = rough.flat;
  const double rough_value = o.injected_rough.value_or(rough.value);
  const double spread = o.injected_rough ? 0.0 : o.clamp_sigmas * std::sqrt(rough.variance);

  TwoStepPlan plan = o.scheme == Scheme::SqueezeRetune ? plan_squeeze_retune(rough_value)
                                                       : plan_phase_retune(rough_value, o.r, spread);
  plan.n_rough = n_rough;

  const HomodyneFrame frame2 = plan.stage2_frame(o.r);
  const std::int64_t m2 = o.m - n_rough;
  const double true_effective = frame2.effective(o.phi_star);
  const auto stage2 =
      sample_gaussian(quadrature_variance(frame2.r, true_effective), m2, derive_seed(o.seed, 2, 0));

  const double lo = plan.window_lower();
  const double hi = plan.window_upper();
  const LikelihoodTerm term2{.frame = frame2, .count = m2, .sum_sq = stage2.sum_sq()};
  const auto post2 = posterior_from_terms({&term2, 1}, o.grid_size, lo, hi);
  out.stage2_mean = post2.mean();
  out.stage2_variance = post2.variance();

  if (o.reuse_rough_data) {
    const std::vector<LikelihoodTerm> terms{
        {.frame = {.r = o.r}, .count = n_rough, .sum_sq = stage1.sum_sq()}, term2};
    const auto post = posterior_from_terms(terms, o.grid_size, lo, hi);
    out.mean = post.mean();
    out.variance = post.variance();
    out.mode = post.mode();
  } else {
    out.mean = post2.mean();
    out.variance = post2.variance();
    out.mode = post2.mode();
  }

  out.plan = plan;
  out.stage1_count = n_rough;
  out.stage2_count = m2;
  out.stage1_sum_sq = stage1.sum_sq();
  out.stage2_sum_sq = stage2.sum_sq();
  return out;
}

}  // namespace phaseest
