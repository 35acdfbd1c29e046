// phaseest command-line front end. Every number printed here comes from the
// C API; this file only parses flags, checks preconditions and formats output.
#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phaseest/phaseest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kQuarterPi = 0.78539816339744830962;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LibraryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(phe_status status) {
  if (status == PHE_OK) return;
  const std::string msg = std::string(phe_status_name(status)) + ": " + phe_last_error();
  throw LibraryError(msg);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

std::string fmt6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json jnum(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// Writes text to the --output path, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LibraryError("i/o error: cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw LibraryError("i/o error: write failed for '" + path + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << '\n';
  return s;
}

std::vector<int64_t> log_grid(int64_t lo, int64_t hi, int points) {
  std::vector<int64_t> out(static_cast<std::size_t>(std::max(points, 1)));
  std::size_t n = 0;
  check(phe_log_grid(lo, hi, points, out.data(), out.size(), &n));
  out.resize(n);
  return out;
}

void require_r(double r) { require(std::isfinite(r) && r >= 0.0, "--r must be a finite value >= 0"); }

void require_open_phase(double phi, const char* flag) {
  require(std::isfinite(phi) && phi > 0.0 && phi < kHalfPi,
          std::string(flag) + " must lie strictly inside (0, pi/2)");
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  double r = 0.0;
  std::optional<double> phi;
  std::string format = "table";
  std::string output;
};

int cmd_bounds(const BoundsArgs& a) {
  require_r(a.r);
  if (a.phi) {
    require(std::isfinite(*a.phi) && *a.phi >= 0.0 && *a.phi <= kHalfPi, "--phi must lie in [0, pi/2]");
  }
  double phi = 0.0;
  if (a.phi) {
    phi = *a.phi;
  } else {
    check(phe_optimal_phase(a.r, &phi));
  }
  phe_bound_report b{};
  check(phe_bounds(a.r, phi, &b));

  std::ostringstream out;
  if (a.format == "json") {
    nlohmann::json j = {{"r", b.r},         {"phi", b.phi},           {"fisher_h", jnum(b.fisher_h)},
                        {"fisher_d", jnum(b.fisher_d)}, {"qfi", jnum(b.qfi)}, {"var_opt", jnum(b.var_opt)},
                        {"phi_h", jnum(b.phi_h)}, {"r_opt", jnum(b.r_opt)}};
    out << j.dump(2) << '\n';
  } else if (a.format == "csv") {
    out << "r,phi,F_H,F_D,H,Var_opt,phi_H,r_opt\n"
        << full(b.r) << ',' << full(b.phi) << ',' << full(b.fisher_h) << ',' << full(b.fisher_d) << ','
        << full(b.qfi) << ',' << full(b.var_opt) << ',' << full(b.phi_h) << ',' << full(b.r_opt) << '\n';
  } else {
    out << "r        " << fmt6(b.r) << '\n'
        << "phi      " << fmt6(b.phi) << '\n'
        << "F_H      " << fmt6(b.fisher_h) << '\n'
        << "F_D      " << fmt6(b.fisher_d) << '\n'
        << "H        " << fmt6(b.qfi) << '\n'
        << "Var_opt  " << fmt6(b.var_opt) << '\n'
        << "phi_H    " << fmt6(b.phi_h) << '\n'
        << "r_opt    " << fmt6(b.r_opt) << '\n';
  }
  emit(a.output, out.str());
  return kExitOk;
}

// ---- posterior ------------------------------------------------------------

struct PosteriorArgs {
  double r = 0.7;
  double phi_star = 0.3;
  std::vector<int64_t> m{10, 50, 100};
  std::optional<std::uint64_t> seed;
  bool asymptotic = false;
  int grid = 2048;
  std::string format = "csv";
  std::string output;
};

int cmd_posterior(const PosteriorArgs& a) {
  require_r(a.r);
  require_open_phase(a.phi_star, "--phi-star");
  require(a.grid >= 64, "--grid must be >= 64");
  require(!a.m.empty(), "--m needs at least one value");
  for (auto m : a.m) require(a.asymptotic ? m >= 1 : m >= 0, "--m values must be >= 1 (>= 0 when sampling)");
  const std::uint64_t seed = a.asymptotic ? 0 : resolve_seed(a.seed);

  std::ostringstream out;
  nlohmann::json curves = nlohmann::json::array();
  if (a.format == "csv") out << "m,phi,density\n";
  for (auto m : a.m) {
    phe_posterior* post = nullptr;
    if (a.asymptotic) {
      check(phe_posterior_asymptotic(a.r, a.phi_star, m, a.grid, &post));
    } else {
      // One stream for every M: smaller records are prefixes of larger ones.
      check(phe_posterior_sampled(a.r, a.phi_star, m, seed, a.grid, &post));
    }
    phe_posterior_summary s{};
    std::vector<double> phis, dens;
    const phe_status st = phe_posterior_summarize(post, &s);
    if (st == PHE_OK) {
      phis.resize(s.size);
      dens.resize(s.size);
      phe_posterior_copy(post, phis.data(), dens.data(), s.size);
    }
    phe_posterior_free(post);
    check(st);
    if (a.format == "json") {
      curves.push_back({{"m", m},
                        {"mean", jnum(s.mean)},
                        {"mode", jnum(s.mode)},
                        {"variance", jnum(s.variance)},
                        {"skewness", jnum(s.skewness)},
                        {"flat", s.flat != 0},
                        {"phi", phis},
                        {"density", dens}});
    } else {
      for (std::size_t i = 0; i < phis.size(); ++i) out << m << ',' << full(phis[i]) << ',' << full(dens[i]) << '\n';
    }
  }
  if (a.format == "json") {
    nlohmann::json doc = {{"r", a.r}, {"phi_star", a.phi_star}, {"asymptotic", a.asymptotic}, {"curves", curves}};
    if (!a.asymptotic) doc["seed"] = seed;
    out << doc.dump(2) << '\n';
  }
  emit(a.output, out.str());
  return kExitOk;
}

// ---- gamma ----------------------------------------------------------------

struct GammaArgs {
  double r = 0.6;
  std::vector<double> phi_star{0.3, 0.6, 0.9};
  int64_t m_min = 10;
  int64_t m_max = 1000;
  int m_points = 13;
  int grid = 2048;
  std::string format = "csv";
  std::string output;
};

int cmd_gamma(const GammaArgs& a) {
  require_r(a.r);
  require(a.r > 0.0, "--r must be > 0 (Fisher information vanishes at r = 0)");
  for (double p : a.phi_star) require_open_phase(p, "--phi-star");
  require(a.m_min >= 1 && a.m_max >= a.m_min, "need 1 <= --m-min <= --m-max");
  require(a.m_points >= 1, "--m-points must be >= 1");
  require(a.grid >= 64, "--grid must be >= 64");

  const auto ms = log_grid(a.m_min, a.m_max, a.m_points);
  std::ostringstream out;
  nlohmann::json rows = nlohmann::json::array();
  if (a.format == "csv") out << "r,phi_star,m,gamma,sigma_g2\n";
  for (double p : a.phi_star) {
    for (auto m : ms) {
      double gamma = 0.0, sg2 = 0.0;
      check(phe_gamma_ratio(a.r, p, m, a.grid, &gamma));
      check(phe_gaussian_approx_variance(a.r, p, m, &sg2));
      if (a.format == "json") {
        rows.push_back({{"r", a.r}, {"phi_star", p}, {"m", m}, {"gamma", gamma}, {"sigma_g2", sg2}});
      } else {
        out << full(a.r) << ',' << full(p) << ',' << m << ',' << full(gamma) << ',' << full(sg2) << '\n';
      }
    }
  }
  if (a.format == "json") out << rows.dump(2) << '\n';
  emit(a.output, out.str());
  return kExitOk;
}

// ---- ratio ----------------------------------------------------------------

struct RatioArgs {
  double phi_star = 0.3;
  double r_min = 0.1;
  double r_max = 1.5;
  int r_steps = 141;
  int64_t m = 100;
  std::string format = "csv";
  std::string output;
};

int cmd_ratio(const RatioArgs& a) {
  require(std::isfinite(a.phi_star) && a.phi_star > 0.0 && a.phi_star <= kQuarterPi,
          "--phi-star must lie in (0, pi/4] (an optimal squeezing exists only there)");
  require(std::isfinite(a.r_min) && a.r_min > 0.0, "--r-min must be > 0");
  require(std::isfinite(a.r_max) && a.r_max >= a.r_min, "--r-max must be >= --r-min");
  require(a.r_steps >= 2, "--r-steps must be >= 2");
  require(a.m >= 1, "--m must be >= 1");

  double r_opt = 0.0;
  check(phe_optimal_squeezing(a.phi_star, &r_opt));
  std::ostringstream out;
  nlohmann::json rows = nlohmann::json::array();
  if (a.format == "csv") out << "r,R\n";
  for (int i = 0; i < a.r_steps; ++i) {
    const double r = a.r_min + (a.r_max - a.r_min) * i / (a.r_steps - 1);
    double ratio = 0.0;
    check(phe_ratio_r(r, a.phi_star, a.m, &ratio));
    if (a.format == "json") {
      rows.push_back({{"r", r}, {"R", ratio}});
    } else {
      out << full(r) << ',' << full(ratio) << '\n';
    }
  }
  if (a.format == "json") {
    out << nlohmann::json({{"phi_star", a.phi_star}, {"m", a.m}, {"r_opt", r_opt}, {"curve", rows}}).dump(2)
        << '\n';
  }
  emit(a.output, out.str());
  return kExitOk;
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  double r = 0.6;
  double phi_star = 0.7;
  std::vector<int64_t> m;
  int64_t m_min = 16;
  int64_t m_max = 2048;
  int m_points = 8;
  int reps = 20;
  std::string scheme = "phase";
  std::optional<std::uint64_t> seed;
  int grid = 2048;
  int64_t n_rough = 0;
  bool discard_rough = false;
  double clamp_sigmas = 2.0;
  unsigned threads = 0;
  std::string format = "csv";
  std::string output;
};

int cmd_experiment(const ExperimentArgs& a) {
  phe_scheme scheme{};
  require(phe_scheme_parse(a.scheme.c_str(), &scheme) == PHE_OK, "--scheme must be one of phase, squeeze, none");
  std::vector<int64_t> ms = a.m;
  if (ms.empty()) {
    require(a.m_min >= 1 && a.m_max >= a.m_min && a.m_points >= 1, "need 1 <= --m-min <= --m-max, --m-points >= 1");
    ms = log_grid(a.m_min, a.m_max, a.m_points);
  }
  phe_experiment_config cfg;
  phe_experiment_config_init(&cfg);
  cfg.r = a.r;
  cfg.phi_star = a.phi_star;
  cfg.m_values = ms.data();
  cfg.m_count = ms.size();
  cfg.repetitions = a.reps;
  cfg.scheme = scheme;
  cfg.grid_size = a.grid;
  cfg.fixed_n_rough = a.n_rough;
  cfg.reuse_rough_data = a.discard_rough ? 0 : 1;
  cfg.clamp_sigmas = a.clamp_sigmas;
  cfg.threads = a.threads;
  if (phe_experiment_validate(&cfg) != PHE_OK) throw UsageError(phe_last_error());
  cfg.seed = resolve_seed(a.seed);

  phe_experiment* exp = nullptr;
  check(phe_experiment_run(&cfg, &exp));
  const char* path = a.output.empty() ? "-" : a.output.c_str();
  const phe_status st = a.format == "json" ? phe_experiment_write_json(exp, path) : phe_experiment_write_csv(exp, path);
  phe_experiment_free(exp);
  check(st);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-shift estimation with squeezed vacuum and homodyne detection"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"csv", "json"});

  BoundsArgs bounds;
  auto* sb = app.add_subcommand("bounds", "Fisher information, QFI and optimal operating point");
  sb->add_option("--r", bounds.r, "squeezing r >= 0")->required();
  sb->add_option("--phi", bounds.phi, "phase shift in [0, pi/2] (default: phi_H(r))");
  sb->add_option("--format", bounds.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  sb->add_option("-o,--output", bounds.output, "output file (default stdout)");

  PosteriorArgs post;
  auto* sp = app.add_subcommand("posterior", "posterior density p(phi|M) on a grid");
  sp->add_option("--r", post.r, "squeezing r")->capture_default_str();
  sp->add_option("--phi-star", post.phi_star, "true phase")->capture_default_str();
  sp->add_option("--m", post.m, "sample sizes, comma separated")->delimiter(',')->capture_default_str();
  sp->add_option("--seed", post.seed, "RNG seed (generated and printed when omitted)");
  sp->add_flag("--asymptotic", post.asymptotic, "use the large-M form instead of sampled data");
  sp->add_option("--grid", post.grid, "grid points")->capture_default_str();
  sp->add_option("--format", post.format)->check(formats)->capture_default_str();
  sp->add_option("-o,--output", post.output, "output file (default stdout)");

  GammaArgs gamma;
  auto* sg = app.add_subcommand("gamma", "ratio of posterior variance to 1/(M F_H) versus M");
  sg->add_option("--r", gamma.r)->capture_default_str();
  sg->add_option("--phi-star", gamma.phi_star, "true phases, comma separated")->delimiter(',')->capture_default_str();
  sg->add_option("--m-min", gamma.m_min)->capture_default_str();
  sg->add_option("--m-max", gamma.m_max)->capture_default_str();
  sg->add_option("--m-points", gamma.m_points, "log-spaced points")->capture_default_str();
  sg->add_option("--grid", gamma.grid)->capture_default_str();
  sg->add_option("--format", gamma.format)->check(formats)->capture_default_str();
  sg->add_option("-o,--output", gamma.output);

  RatioArgs ratio;
  auto* sr = app.add_subcommand("ratio", "R(r) = qfi(r)/F_H(r, phi*) over a squeezing sweep");
  sr->add_option("--phi-star", ratio.phi_star)->capture_default_str();
  sr->add_option("--r-min", ratio.r_min)->capture_default_str();
  sr->add_option("--r-max", ratio.r_max)->capture_default_str();
  sr->add_option("--r-steps", ratio.r_steps)->capture_default_str();
  sr->add_option("--m", ratio.m, "sample size (cancels; kept for labelling)")->capture_default_str();
  sr->add_option("--format", ratio.format)->check(formats)->capture_default_str();
  sr->add_option("-o,--output", ratio.output);

  ExperimentArgs exp;
  auto* se = app.add_subcommand("experiment", "seeded Monte Carlo sweep of A and V ratios");
  se->add_option("--r", exp.r)->capture_default_str();
  se->add_option("--phi-star", exp.phi_star)->capture_default_str();
  se->add_option("--m", exp.m, "explicit M values, comma separated")->delimiter(',');
  se->add_option("--m-min", exp.m_min)->capture_default_str();
  se->add_option("--m-max", exp.m_max)->capture_default_str();
  se->add_option("--m-points", exp.m_points)->capture_default_str();
  se->add_option("--reps", exp.reps)->capture_default_str();
  se->add_option("--scheme", exp.scheme, "phase, squeeze or none")->capture_default_str();
  se->add_option("--seed", exp.seed, "master seed (generated and printed when omitted)");
  se->add_option("--grid", exp.grid)->capture_default_str();
  se->add_option("--n-rough", exp.n_rough, "fixed rough-stage size (default floor(3 sqrt M))");
  se->add_flag("--discard-rough-data", exp.discard_rough, "drop stage-1 data from the final posterior");
  se->add_option("--clamp-sigmas", exp.clamp_sigmas)->capture_default_str();
  se->add_option("--threads", exp.threads, "worker threads (0: all cores)");
  se->add_option("--format", exp.format)->check(formats)->capture_default_str();
  se->add_option("-o,--output", exp.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sb->parsed()) return cmd_bounds(bounds);
    if (sp->parsed()) return cmd_posterior(post);
    if (sg->parsed()) return cmd_gamma(gamma);
    if (sr->parsed()) return cmd_ratio(ratio);
    if (se->parsed()) return cmd_experiment(exp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LibraryError& e) {
    std::cerr << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
