#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "phaseest/measurement.hpp"
#include "phaseest/posterior.hpp"

namespace phaseest {

enum class Scheme {
  None,           // single stage on all M data
  SqueezeRetune,  // retune r to r_opt(rough)
  PhaseRetune,    // retune varphi - psi so the detector sits at φ_H
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

// Largest squeezing the squeeze-retune plan will request. Rough estimates
// near 0 or π/2 would otherwise ask for unbounded energy.
inline constexpr double kMaxRetunedSqueezing = 3.0;

// Default clamp window half-width for the phase-retune plan, in stage-1
// posterior standard deviations.
inline constexpr double kDefaultClampSigmas = 2.0;

// ⌊3√M⌋, computed in integers.
std::int64_t default_rough_count(std::int64_t m);

struct RoughEstimate {
  double value = kQuarterPi;  // Mode[φ] of the stage-1 posterior
  double variance = 0.0;      // stage-1 posterior variance
  bool flat = false;          // posterior carried no information
};

RoughEstimate rough_estimate(const HomodyneBatch& prefix, double r,
                             int grid_size = kDefaultGridSize);

struct TwoStepPlan {
  Scheme scheme = Scheme::None;
  std::int64_t n_rough = 0;
  double rough_estimate = 0.0;
  // SqueezeRetune: squeezing used in stage 2, and whether the frame was
  // reflected (rough > π/4 is handled as π/2 - rough with squeezing -r).
  double retuned_r = 0.0;
  bool reflected = false;
  // PhaseRetune: φ_eff = φ* + phase_offset; nominally φ_H(r) - rough.
  double phase_offset = 0.0;
  bool clamped = false;

  // Frame of the second-stage data and the φ* window it can resolve.
  HomodyneFrame stage2_frame(double stage1_r) const;
  double window_lower() const;
  double window_upper() const;
};

// rough ∈ (0, π/2); boundaries are non-identifiable.
TwoStepPlan plan_squeeze_retune(double rough);

// rough ∈ (0, π/2), r > 0. spread is the half-width of the set of plausible
// φ* around rough; the offset is clamped so that this set maps inside
// [0, π/2]. spread = 0 leaves φ_eff = φ* + φ_H - rough unmodified.
TwoStepPlan plan_phase_retune(double rough, double r, double spread = 0.0);

struct TwoStepOptions {
  Scheme scheme = Scheme::PhaseRetune;
  double r = 0.6;
  double phi_star = 0.7;
  std::int64_t m = 100;
  std::uint64_t seed = 0;
  int grid_size = kDefaultGridSize;
  std::optional<std::int64_t> n_rough;  // default ⌊3√M⌋
  // Keep stage-1 data in the final posterior (in their own frame).
  bool reuse_rough_data = true;
  double clamp_sigmas = kDefaultClampSigmas;
  // Replace the stage-1 Mode with this value (testing the ideal feedback).
  std::optional<double> injected_rough;
};

struct TwoStepOutcome {
  double mean = 0.0;      // final estimate φ̄
  double variance = 0.0;  // final posterior variance
  double mode = 0.0;
  TwoStepPlan plan;
  std::int64_t stage1_count = 0;
  std::int64_t stage2_count = 0;
  double stage1_sum_sq = 0.0;
  double stage2_sum_sq = 0.0;
  // Posterior from stage-2 data alone, in φ* coordinates.
  double stage2_mean = 0.0;
  double stage2_variance = 0.0;
  bool rough_flat = false;
};

// Stage 1 samples N_r points at the true phase and takes the posterior mode;
// stage 2 samples M - N_r points in the retuned frame. Seeds for the two
// stages are derive_seed(seed, 1, 0) and derive_seed(seed, 2, 0); the
// single-stage baseline draws all M points from the stage-1 stream.
TwoStepOutcome run_two_step(const TwoStepOptions& options);

}  // namespace phaseest
