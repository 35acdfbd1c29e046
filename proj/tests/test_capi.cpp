// Exercises the shared-library surface through the C header only.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "phaseest/phaseest.h"

TEST_CASE("bounds through the C API") {
  phe_bound_report b{};
  double phi_h = 0;
  REQUIRE(phe_optimal_phase(0.6, &phi_h) == PHE_OK);
  REQUIRE(phe_bounds(0.6, phi_h, &b) == PHE_OK);
  CHECK(b.fisher_h == doctest::Approx(4.55696).epsilon(1e-5));
  CHECK(b.qfi == doctest::Approx(b.fisher_h).epsilon(1e-12));
  CHECK(b.fisher_d == doctest::Approx(1.6213111).epsilon(1e-7));

  CHECK(phe_bounds(-1.0, 0.3, &b) == PHE_ERR_DOMAIN);
  CHECK(std::string(phe_last_error()).find("r must be") != std::string::npos);
  CHECK(phe_bounds(0.6, 0.3, nullptr) == PHE_ERR_INVALID_ARGUMENT);
  double v = 0;
  CHECK(phe_ratio_r(0.0, 0.3, 1, &v) == PHE_ERR_NON_IDENTIFIABLE);
  CHECK(phe_gaussian_approx_variance(0.6, 0.0, 10, &v) == PHE_ERR_NON_IDENTIFIABLE);
  CHECK(phe_optimal_squeezing(0.3, &v) == PHE_OK);
  CHECK(v == doctest::Approx(0.5867).epsilon(1e-4));
  CHECK(std::string(phe_status_name(PHE_ERR_IO)) == "i/o error");
}

TEST_CASE("posterior handles") {
  phe_posterior* post = nullptr;
  REQUIRE(phe_posterior_asymptotic(0.7, 0.3, 100, 0, &post) == PHE_OK);
  phe_posterior_summary s{};
  REQUIRE(phe_posterior_summarize(post, &s) == PHE_OK);
  CHECK(s.size == 2048);
  CHECK(std::abs(s.mode - 0.3) < (M_PI / 2) / 2047);
  CHECK(s.skewness > 0);

  std::vector<double> phis(s.size), dens(s.size);
  CHECK(phe_posterior_copy(post, phis.data(), dens.data(), 10) == PHE_ERR_INVALID_ARGUMENT);
  REQUIRE(phe_posterior_copy(post, phis.data(), dens.data(), phis.size()) == PHE_OK);
  double integral = 0;
  for (std::size_t i = 1; i < phis.size(); ++i) integral += 0.5 * (dens[i] + dens[i - 1]) * (phis[i] - phis[i - 1]);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
  phe_posterior_free(post);

  const double xs[] = {0.1, -0.4, 0.3, 0.05};
  const double xs_perm[] = {0.3, 0.05, -0.4, 0.1};
  phe_posterior* a = nullptr;
  phe_posterior* b = nullptr;
  REQUIRE(phe_posterior_from_samples(xs, 4, 0.5, 256, &a) == PHE_OK);
  REQUIRE(phe_posterior_from_samples(xs_perm, 4, 0.5, 256, &b) == PHE_OK);
  phe_posterior_summary sa{}, sb{};
  phe_posterior_summarize(a, &sa);
  phe_posterior_summarize(b, &sb);
  CHECK(sa.mean == sb.mean);
  CHECK(sa.variance == sb.variance);
  phe_posterior_free(a);
  phe_posterior_free(b);

  phe_posterior* flat = nullptr;
  REQUIRE(phe_posterior_from_statistics(0, 0.0, 0.5, 128, &flat) == PHE_OK);
  phe_posterior_summarize(flat, &sa);
  CHECK(sa.flat == 1);
  CHECK(sa.mode == doctest::Approx(M_PI / 4));
  phe_posterior_free(flat);

  CHECK(phe_posterior_sampled(0.7, 0.3, 10, 1, 8, &post) == PHE_ERR_DOMAIN);
  CHECK(post == nullptr);
  phe_posterior_free(nullptr);
}

TEST_CASE("two-step runs and experiments through the C API") {
  phe_two_step_options o;
  phe_two_step_options_init(&o);
  o.m = 400;
  o.seed = 5;
  phe_two_step_result res{};
  REQUIRE(phe_run_two_step(&o, &res) == PHE_OK);
  CHECK(res.stage1_count == 60);
  CHECK(res.stage2_count == 340);
  o.m = 10;
  CHECK(phe_run_two_step(&o, &res) == PHE_ERR_DOMAIN);

  phe_scheme scheme{};
  CHECK(phe_scheme_parse("squeeze", &scheme) == PHE_OK);
  CHECK(scheme == PHE_SCHEME_SQUEEZE);
  CHECK(phe_scheme_parse("bogus", &scheme) == PHE_ERR_INVALID_ARGUMENT);

  const int64_t ms[] = {16, 64};
  phe_experiment_config cfg;
  phe_experiment_config_init(&cfg);
  cfg.m_values = ms;
  cfg.m_count = 2;
  cfg.repetitions = 3;
  cfg.grid_size = 256;
  cfg.seed = 8;
  REQUIRE(phe_experiment_validate(&cfg) == PHE_OK);
  phe_experiment* exp = nullptr;
  REQUIRE(phe_experiment_run(&cfg, &exp) == PHE_OK);
  REQUIRE(phe_experiment_aggregate_count(exp) == 2);
  phe_aggregate agg{};
  REQUIRE(phe_experiment_aggregate(exp, 1, &agg) == PHE_OK);
  CHECK(agg.m == 64);
  CHECK(agg.n_ok == 3);
  CHECK(phe_experiment_aggregate(exp, 2, &agg) == PHE_ERR_INVALID_ARGUMENT);

  const char* path = "phaseest_capi_test.csv";
  REQUIRE(phe_experiment_write_csv(exp, path) == PHE_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("m,A,A_stderr,V,V_stderr,mean_rough,clamp_count", 0) == 0);
  std::remove(path);
  CHECK(phe_experiment_write_csv(exp, "/nonexistent-dir/x.csv") == PHE_ERR_IO);
  phe_experiment_free(exp);

  const int64_t bad[] = {64, 16};
  cfg.m_values = bad;
  CHECK(phe_experiment_validate(&cfg) == PHE_ERR_DOMAIN);
  CHECK(phe_experiment_run(&cfg, &exp) == PHE_ERR_DOMAIN);
  CHECK(exp == nullptr);

  int64_t grid[16];
  size_t n = 0;
  REQUIRE(phe_log_grid(16, 2048, 8, grid, 16, &n) == PHE_OK);
  CHECK(n == 8);
  CHECK(grid[7] == 2048);
}
