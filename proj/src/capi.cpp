#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <string>

#include "phaseest/adaptive.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/experiment.hpp"
#include "phaseest/fisher.hpp"
#include "phaseest/phaseest.h"
#include "phaseest/posterior.hpp"

struct phe_posterior {
  phaseest::PosteriorGrid grid;
};

struct phe_experiment {
  phaseest::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

phe_status fail(phe_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn, mapping library exceptions onto status codes.
template <class Fn>
phe_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PHE_OK;
  } catch (const phaseest::NonIdentifiable& e) {
    return fail(PHE_ERR_NON_IDENTIFIABLE, e.what());
  } catch (const phaseest::DomainError& e) {
    return fail(PHE_ERR_DOMAIN, e.what());
  } catch (const phaseest::IoError& e) {
    return fail(PHE_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PHE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PHE_ERR_INTERNAL, e.what());
  }
}

#define PHE_REQUIRE(ptr)                                                  \
  do {                                                                    \
    if ((ptr) == nullptr) return fail(PHE_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

int grid_or_default(int32_t grid_size) {
  return grid_size <= 0 ? phaseest::kDefaultGridSize : grid_size;
}

bool to_scheme(phe_scheme s, phaseest::Scheme& out) {
  switch (s) {
    case PHE_SCHEME_NONE: out = phaseest::Scheme::None; return true;
    case PHE_SCHEME_SQUEEZE: out = phaseest::Scheme::SqueezeRetune; return true;
    case PHE_SCHEME_PHASE: out = phaseest::Scheme::PhaseRetune; return true;
  }
  return false;
}

bool is_stdout(const char* path) { return path == nullptr || std::strcmp(path, "-") == 0; }

template <class Writer>
void write_to(const char* path, Writer&& writer) {
  if (is_stdout(path)) {
    writer(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw phaseest::IoError(std::string("cannot open '") + path + "' for writing");
  writer(out);
  if (!out.flush()) throw phaseest::IoError(std::string("write failed for '") + path + "'");
}

phe_status make_posterior(phaseest::PosteriorGrid grid, phe_posterior** out) {
  *out = new phe_posterior{std::move(grid)};
  return PHE_OK;
}

phe_status build_config(const phe_experiment_config* c, phaseest::ExperimentConfig& cfg) {
  if (c->m_count > 0 && c->m_values == nullptr) {
    return fail(PHE_ERR_INVALID_ARGUMENT, "m_values is null but m_count > 0");
  }
  if (!to_scheme(c->scheme, cfg.scheme)) return fail(PHE_ERR_INVALID_ARGUMENT, "unknown scheme");
  cfg.r = c->r;
  cfg.phi_star = c->phi_star;
  cfg.m_values.assign(c->m_values, c->m_values + c->m_count);
  cfg.repetitions = c->repetitions;
  cfg.seed = c->seed;
  cfg.grid_size = grid_or_default(c->grid_size);
  if (c->fixed_n_rough > 0) cfg.fixed_n_rough = c->fixed_n_rough;
  cfg.reuse_rough_data = c->reuse_rough_data != 0;
  cfg.clamp_sigmas = c->clamp_sigmas;
  cfg.threads = c->threads;
  return PHE_OK;
}

}  // namespace

extern "C" {

const char* phe_last_error(void) { return g_last_error.c_str(); }

const char* phe_version(void) { return "1.0.0"; }

const char* phe_status_name(phe_status status) {
  switch (status) {
    case PHE_OK: return "ok";
    case PHE_ERR_DOMAIN: return "domain error";
    case PHE_ERR_NON_IDENTIFIABLE: return "non-identifiable";
    case PHE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PHE_ERR_IO: return "i/o error";
    case PHE_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

phe_status phe_bounds(double r, double phi, phe_bound_report* out) {
  PHE_REQUIRE(out);
  return guarded([&] {
    const auto b = phaseest::bounds(r, phi);
    *out = {b.r, b.phi, b.fisher_h, b.fisher_d, b.qfi, b.var_opt, b.phi_h, b.r_opt};
  });
}

phe_status phe_fisher_homodyne(double r, double phi, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::fisher_homodyne(r, phi); });
}

phe_status phe_fisher_heterodyne(double r, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::fisher_heterodyne(r); });
}

phe_status phe_qfi(double r, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::qfi(r); });
}

phe_status phe_optimal_phase(double r, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::optimal_phase(r); });
}

phe_status phe_optimal_squeezing(double phi, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::optimal_squeezing(phi); });
}

phe_status phe_ratio_r(double r, double phi_star, int64_t m, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::ratio_R(r, phi_star, m); });
}

phe_status phe_gaussian_approx_variance(double r, double phi_star, int64_t m, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::gaussian_approx_variance(r, phi_star, m); });
}

phe_status phe_gamma_ratio(double r, double phi_star, int64_t m, int32_t grid_size, double* out) {
  PHE_REQUIRE(out);
  return guarded([&] { *out = phaseest::gamma_ratio(r, phi_star, m, grid_or_default(grid_size)); });
}

phe_status phe_posterior_sampled(double r, double phi_star, int64_t m, uint64_t seed,
                                 int32_t grid_size, phe_posterior** out) {
  PHE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto batch = phaseest::sample_homodyne(r, phi_star, m, seed);
    make_posterior(phaseest::posterior_from_batch(batch, r, grid_or_default(grid_size)), out);
  });
}

phe_status phe_posterior_from_statistics(int64_t count, double sum_sq, double r, int32_t grid_size,
                                         phe_posterior** out) {
  PHE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    make_posterior(phaseest::posterior_from_statistics(count, sum_sq, r, grid_or_default(grid_size)),
                   out);
  });
}

phe_status phe_posterior_from_samples(const double* xs, size_t n, double r, int32_t grid_size,
                                      phe_posterior** out) {
  PHE_REQUIRE(out);
  *out = nullptr;
  if (n > 0 && xs == nullptr) return fail(PHE_ERR_INVALID_ARGUMENT, "xs is null but n > 0");
  return guarded([&] {
    const auto batch = phaseest::HomodyneBatch::from_values({xs, n});
    make_posterior(phaseest::posterior_from_batch(batch, r, grid_or_default(grid_size)), out);
  });
}

phe_status phe_posterior_asymptotic(double r, double phi_star, int64_t m, int32_t grid_size,
                                    phe_posterior** out) {
  PHE_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    make_posterior(phaseest::asymptotic_posterior(r, phi_star, m, grid_or_default(grid_size)), out);
  });
}

phe_status phe_posterior_summarize(const phe_posterior* post, phe_posterior_summary* out) {
  PHE_REQUIRE(post);
  PHE_REQUIRE(out);
  return guarded([&] {
    const auto& g = post->grid;
    out->lower = g.lower();
    out->upper = g.upper();
    out->mean = g.mean();
    out->mode = g.mode();
    out->variance = g.variance();
    out->skewness = g.variance() > 0.0 ? phaseest::skewness(g)
                                       : std::numeric_limits<double>::quiet_NaN();
    out->log_norm = g.log_norm();
    out->flat = g.flat() ? 1 : 0;
    out->size = g.size();
  });
}

phe_status phe_posterior_copy(const phe_posterior* post, double* phis, double* density,
                              size_t capacity) {
  PHE_REQUIRE(post);
  const auto& g = post->grid;
  if (capacity < g.size()) {
    return fail(PHE_ERR_INVALID_ARGUMENT,
                "buffer holds " + std::to_string(capacity) + " points, need " + std::to_string(g.size()));
  }
  if (phis) std::copy(g.phis().begin(), g.phis().end(), phis);
  if (density) std::copy(g.density().begin(), g.density().end(), density);
  g_last_error.clear();
  return PHE_OK;
}

phe_status phe_posterior_write_csv(const phe_posterior* post, const char* path) {
  PHE_REQUIRE(post);
  return guarded([&] {
    write_to(path, [&](std::ostream& os) { phaseest::write_posterior_csv(post->grid, os); });
  });
}

void phe_posterior_free(phe_posterior* post) { delete post; }

phe_status phe_scheme_parse(const char* name, phe_scheme* out) {
  PHE_REQUIRE(name);
  PHE_REQUIRE(out);
  const auto s = phaseest::parse_scheme(name);
  if (!s) return fail(PHE_ERR_INVALID_ARGUMENT, std::string("unknown scheme '") + name + "'");
  switch (*s) {
    case phaseest::Scheme::None: *out = PHE_SCHEME_NONE; break;
    case phaseest::Scheme::SqueezeRetune: *out = PHE_SCHEME_SQUEEZE; break;
    case phaseest::Scheme::PhaseRetune: *out = PHE_SCHEME_PHASE; break;
  }
  g_last_error.clear();
  return PHE_OK;
}

void phe_two_step_options_init(phe_two_step_options* o) {
  if (!o) return;
  const phaseest::TwoStepOptions d;
  *o = {};
  o->scheme = PHE_SCHEME_PHASE;
  o->r = d.r;
  o->phi_star = d.phi_star;
  o->m = d.m;
  o->seed = d.seed;
  o->grid_size = d.grid_size;
  o->n_rough = 0;
  o->reuse_rough_data = d.reuse_rough_data ? 1 : 0;
  o->clamp_sigmas = d.clamp_sigmas;
  o->inject_rough = 0;
  o->injected_rough = 0.0;
}

phe_status phe_run_two_step(const phe_two_step_options* o, phe_two_step_result* out) {
  PHE_REQUIRE(o);
  PHE_REQUIRE(out);
  phaseest::TwoStepOptions opts;
  if (!to_scheme(o->scheme, opts.scheme)) return fail(PHE_ERR_INVALID_ARGUMENT, "unknown scheme");
  opts.r = o->r;
  opts.phi_star = o->phi_star;
  opts.m = o->m;
  opts.seed = o->seed;
  opts.grid_size = grid_or_default(o->grid_size);
  if (o->n_rough > 0) opts.n_rough = o->n_rough;
  opts.reuse_rough_data = o->reuse_rough_data != 0;
  opts.clamp_sigmas = o->clamp_sigmas;
  if (o->inject_rough) opts.injected_rough = o->injected_rough;
  return guarded([&] {
    const auto res = phaseest::run_two_step(opts);
    *out = {};
    out->mean = res.mean;
    out->variance = res.variance;
    out->mode = res.mode;
    out->rough_estimate = res.plan.rough_estimate;
    out->retuned_r = res.plan.retuned_r;
    out->phase_offset = res.plan.phase_offset;
    out->reflected = res.plan.reflected ? 1 : 0;
    out->clamped = res.plan.clamped ? 1 : 0;
    out->stage1_count = res.stage1_count;
    out->stage2_count = res.stage2_count;
    out->stage2_mean = res.stage2_mean;
    out->stage2_variance = res.stage2_variance;
  });
}

void phe_experiment_config_init(phe_experiment_config* c) {
  if (!c) return;
  const phaseest::ExperimentConfig d;
  *c = {};
  c->r = d.r;
  c->phi_star = d.phi_star;
  c->m_values = nullptr;
  c->m_count = 0;
  c->repetitions = d.repetitions;
  c->scheme = PHE_SCHEME_PHASE;
  c->seed = d.seed;
  c->grid_size = d.grid_size;
  c->fixed_n_rough = 0;
  c->reuse_rough_data = d.reuse_rough_data ? 1 : 0;
  c->clamp_sigmas = d.clamp_sigmas;
  c->threads = 0;
}

phe_status phe_experiment_validate(const phe_experiment_config* c) {
  PHE_REQUIRE(c);
  phaseest::ExperimentConfig cfg;
  if (const auto s = build_config(c, cfg); s != PHE_OK) return s;
  return guarded([&] { phaseest::validate(cfg); });
}

phe_status phe_experiment_run(const phe_experiment_config* c, phe_experiment** out) {
  PHE_REQUIRE(c);
  PHE_REQUIRE(out);
  *out = nullptr;
  phaseest::ExperimentConfig cfg;
  if (const auto s = build_config(c, cfg); s != PHE_OK) return s;
  return guarded([&] { *out = new phe_experiment{phaseest::run_experiment(cfg)}; });
}

size_t phe_experiment_aggregate_count(const phe_experiment* exp) {
  return exp ? exp->result.aggregates.size() : 0;
}

phe_status phe_experiment_aggregate(const phe_experiment* exp, size_t index, phe_aggregate* out) {
  PHE_REQUIRE(exp);
  PHE_REQUIRE(out);
  if (index >= exp->result.aggregates.size()) {
    return fail(PHE_ERR_INVALID_ARGUMENT, "aggregate index out of range");
  }
  const auto& a = exp->result.aggregates[index];
  *out = {a.m,           a.a,          a.a_stderr,         a.v,
          a.v_stderr,    a.mean_rough, a.clamp_count,      a.mean_estimate,
          a.mean_variance, a.ensemble_variance, a.n_ok,    a.n_failed};
  g_last_error.clear();
  return PHE_OK;
}

phe_status phe_experiment_write_csv(const phe_experiment* exp, const char* path) {
  PHE_REQUIRE(exp);
  return guarded(
      [&] { write_to(path, [&](std::ostream& os) { phaseest::write_csv(exp->result, os); }); });
}

phe_status phe_experiment_write_json(const phe_experiment* exp, const char* path) {
  PHE_REQUIRE(exp);
  return guarded(
      [&] { write_to(path, [&](std::ostream& os) { phaseest::write_json(exp->result, os); }); });
}

void phe_experiment_free(phe_experiment* exp) { delete exp; }

phe_status phe_log_grid(int64_t lo, int64_t hi, int32_t points, int64_t* out, size_t capacity,
                        size_t* written) {
  PHE_REQUIRE(written);
  return guarded([&] {
    const auto grid = phaseest::log_grid(lo, hi, points);
    *written = grid.size();
    if (out == nullptr || capacity < grid.size()) {
      throw phaseest::DomainError("log grid needs " + std::to_string(grid.size()) + " slots");
    }
    std::copy(grid.begin(), grid.end(), out);
  });
}

}  // extern "C"
