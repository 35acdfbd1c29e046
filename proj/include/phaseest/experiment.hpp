#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phaseest/adaptive.hpp"

namespace phaseest {

struct ExperimentConfig {
  double r = 0.6;
  double phi_star = 0.7;
  std::vector<std::int64_t> m_values;
  int repetitions = 20;
  Scheme scheme = Scheme::PhaseRetune;
  std::uint64_t seed = 0;
  int grid_size = kDefaultGridSize;
  std::optional<std::int64_t> fixed_n_rough;  // unset: ⌊3√M⌋
  bool reuse_rough_data = true;
  double clamp_sigmas = kDefaultClampSigmas;
  unsigned threads = 0;  // 0: hardware concurrency; results do not depend on it
};

// Throws DomainError describing the first violated constraint.
void validate(const ExperimentConfig& config);

// Powers-of-two style log grid: round(lo·(hi/lo)^{k/(n-1)}), deduplicated.
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, int points);

struct RunRecord {
  std::int64_t m = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double mean = 0.0;
  double variance = 0.0;
  double mode = 0.0;
  double rough_estimate = 0.0;
  std::int64_t n_rough = 0;
  bool clamped = false;
};

// Per-M summary over repetitions that completed.
//   A = mean(φ̄)/φ*,  V = sqrt(mean(Var[φ]) · M · qfi(r)).
// Standard errors: sd/√n for A, delta method for V. NaN when n < 2.
struct Aggregate {
  std::int64_t m = 0;
  double a = 0.0;
  double a_stderr = 0.0;
  double v = 0.0;
  double v_stderr = 0.0;
  double mean_rough = 0.0;  // NaN for the single-stage scheme
  int clamp_count = 0;
  double mean_estimate = 0.0;
  double mean_variance = 0.0;
  double ensemble_variance = 0.0;  // sample variance of φ̄ across repetitions
  int n_ok = 0;
  int n_failed = 0;

  bool operator==(const Aggregate&) const = default;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunRecord> runs;  // ordered by (M, repetition)
  std::vector<Aggregate> aggregates;
};

// Child seed of run (M, rep) is derive_seed(config.seed, M, rep).
ExperimentResult run_experiment(const ExperimentConfig& config);

// Aggregates as CSV (RFC 4180, CRLF records). Doubles use the shortest
// round-tripping decimal form.
void write_csv(const ExperimentResult& result, std::ostream& out);
void emit_csv(const ExperimentResult& result, const std::filesystem::path& path);
std::vector<Aggregate> read_aggregates_csv(std::istream& in);

// {"config": ..., "aggregates": [...], "runs": [...]}; NaN becomes null.
void write_json(const ExperimentResult& result, std::ostream& out);
void emit_json(const ExperimentResult& result, const std::filesystem::path& path);

}  // namespace phaseest
