// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "phaseest/adaptive.hpp"
#include "phaseest/constants.hpp"
#include "phaseest/experiment.hpp"
#include "phaseest/fisher.hpp"
#include "phaseest/measurement.hpp"
#include "phaseest/posterior.hpp"
#include "phaseest/rng.hpp"

using namespace phaseest;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    v.pass = false;
    v.detail += " [over time budget]";
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s  %-34s %7.2fs / %gs  %s\n", id, v.pass ? "PASS" : "FAIL", title, secs, budget_s,
              v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::vector<double> r_grid() {
  std::vector<double> rs;
  for (int i = 1; i <= 15; ++i) rs.push_back(0.1 * i);
  return rs;
}

// Heterodyne outcome density built from the rotated probe covariance plus
// vacuum noise; the Fisher information follows by quadrature.
double oracle_heterodyne_fisher(double r, double phi) {
  const oracle::Mat2 base{{{0.25 * std::exp(2 * r), 0.0}, {0.0, 0.25 * std::exp(-2 * r)}}};
  const auto logpdf = [&](double x, double y, double p) {
    oracle::Mat2 s = oracle::rotate(base, p);
    s[0][0] += 0.25;
    s[1][1] += 0.25;
    const double det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    const double q = (s[1][1] * x * x - 2 * s[0][1] * x * y + s[0][0] * y * y) / det;
    return -std::log(2 * M_PI * std::sqrt(det)) - 0.5 * q;
  };
  const double h = 1e-4;
  const double half = 9.0 * std::sqrt(0.25 * std::exp(2 * r) + 0.25);
  return oracle::simpson2d(
      [&](double x, double y) {
        const double d = (logpdf(x, y, phi + h) - logpdf(x, y, phi - h)) / (2 * h);
        return std::exp(logpdf(x, y, phi)) * d * d;
      },
      -half, half, 400);
}

// Criterion 9 helper: mean of stage-2 variance ratio with the exact rough value injected.
double injected_stage2_ratio(double r, double phi_star, std::int64_t m, int reps) {
  double acc = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    TwoStepOptions o;
    o.scheme = Scheme::PhaseRetune;
    o.r = r;
    o.phi_star = phi_star;
    o.m = m;
    o.seed = derive_seed(0xAC0FFEEULL, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(rep));
    o.injected_rough = phi_star;
    const auto out = run_two_step(o);
    acc += out.stage2_variance * static_cast<double>(out.stage2_count) / optimal_variance(r);
  }
  return acc / reps;
}

ExperimentConfig fig5_config(double r, Scheme scheme) {
  ExperimentConfig c;
  c.r = r;
  c.phi_star = 0.7;
  c.m_values = log_grid(16, 2048, 8);
  c.repetitions = 20;
  c.scheme = scheme;
  c.seed = 20070601;
  return c;
}

}  // namespace

int main() {
  std::printf("phaseest acceptance suite\n");

  report(1, "QFI saturation at phi_H", 1.0, [] {
    double worst = 0.0;
    for (double r : r_grid()) {
      const double target = 2.0 * std::pow(std::sinh(2 * r), 2);
      worst = std::max(worst, std::abs(fisher_homodyne(r, optimal_phase(r)) / target - 1.0));
    }
    return Verdict{worst < 1e-9, fmt("max rel err %.2e (tol 1e-9)", worst)};
  });

  report(2, "phi_H(0.2), phi_H(0.6) to 2 dp", 1.0, [] {
    const double a = optimal_phase(0.2);
    const double b = optimal_phase(0.6);
    const bool ok = std::round(a * 100) == 59 && std::round(b * 100) == 29;
    return Verdict{ok, fmt("phi_H(0.2)=%.5f phi_H(0.6)=%.5f (want 0.59, 0.29)", a, b)};
  });

  report(3, "double homodyne vs quadrature", 10.0, [] {
    double worst_oracle = 0.0, worst_lib = 0.0, margin = INFINITY;
    for (double r : r_grid()) {
      const double fd = fisher_heterodyne(r);
      const double closed = 4.0 * std::pow(std::sinh(r), 2);
      worst_oracle = std::max(worst_oracle, std::abs(oracle_heterodyne_fisher(r, 0.4) / closed - 1.0));
      worst_lib = std::max(worst_lib, std::abs(numeric_fisher_heterodyne(r, 0.4) / closed - 1.0));
      worst_lib = std::max(worst_lib, std::abs(fd / closed - 1.0));
      margin = std::min(margin, fisher_homodyne(r, optimal_phase(r)) - fd);
    }
    const bool ok = worst_oracle < 1e-5 && worst_lib < 1e-5 && margin >= 0.0;
    return Verdict{ok, fmt("oracle %.2e, library quadrature %.2e (tol 1e-5), min F_H-F_D %.3g", worst_oracle,
                           worst_lib, margin)};
  });

  report(4, "numeric vs analytic homodyne F", 10.0, [] {
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> ur(0.05, 1.5), up(0.05, kHalfPi - 0.05);
    double worst_oracle = 0.0, worst_lib = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double r = ur(gen), phi = up(gen);
      const double f = fisher_homodyne(r, phi);
      worst_oracle = std::max(worst_oracle, std::abs(oracle::homodyne_fisher(r, phi) / f - 1.0));
      worst_lib = std::max(worst_lib, std::abs(numeric_fisher_homodyne(r, phi) / f - 1.0));
    }
    const bool ok = worst_oracle < 1e-5 && worst_lib < 1e-5;
    return Verdict{ok, fmt("20 points: oracle %.2e, library quadrature %.2e (tol 1e-5)", worst_oracle, worst_lib)};
  });

  report(5, "posterior mode/norm/sufficiency", 10.0, [] {
    double worst_mode = 0.0, worst_norm = 0.0;
    for (double r : {0.2, 0.6, 1.0})
      for (double phi : {0.3, 0.7, 1.1})
        for (std::int64_t m : {100, 1000, 10000}) {
          const auto post = asymptotic_posterior(r, phi, m);
          worst_mode = std::max(worst_mode, std::abs(post.mode() - phi) / post.step());
          worst_norm = std::max(worst_norm, std::abs(post.integral() - 1.0));
        }
    const auto batch = sample_homodyne(0.6, 0.5, 500, 77);
    std::vector<double> xs;
    for (const auto& s : batch.samples()) xs.push_back(s.x);
    std::shuffle(xs.begin(), xs.end(), std::mt19937_64(5));
    const auto a = posterior_from_batch(batch, 0.6);
    const auto b = posterior_from_batch(HomodyneBatch::from_values(xs), 0.6);
    const bool same = std::ranges::equal(a.log_density(), b.log_density());
    const bool ok = worst_mode <= 1.0 && worst_norm < 1e-8 && same;
    std::string d = fmt("27 cases: max |mode-phi*|/step %.3f, max |norm-1| %.1e", worst_mode, worst_norm);
    d += same ? ", shuffled data identical" : ", shuffled data DIFFER";
    return Verdict{ok, d};
  });

  report(6, "Cramer-Rao saturation M=1e4", 60.0, [] {
    const double r = 0.6, phi = 0.3;
    const std::int64_t m = 10000;
    double acc = 0.0;
    for (int s = 0; s < 20; ++s) {
      const auto post = posterior_from_batch(sample_homodyne(r, phi, m, derive_seed(600, s, 0)), r);
      acc += post.variance() * m * fisher_homodyne(r, phi);
    }
    const double mean = acc / 20;
    return Verdict{mean >= 0.9 && mean <= 1.1, fmt("mean Var*M*F_H = %.4f (want [0.9, 1.1])", mean)};
  });

  report(7, "Gamma convergence ordering", 60.0, [] {
    std::vector<std::int64_t> bad;
    for (auto m : log_grid(10, 1000, 13)) {
      const double g3 = gamma_ratio(0.6, 0.3, m), g9 = gamma_ratio(0.6, 0.9, m);
      if (!(std::abs(g3 - 1.0) < std::abs(g9 - 1.0))) bad.push_back(m);
    }
    double worst = 0.0;
    for (double r : {0.2, 0.6})
      for (double p : {0.3, 0.6, 0.9}) worst = std::max(worst, std::abs(gamma_ratio(r, p, 10000) - 1.0));
    std::ostringstream d;
    d << "ordering violated at M = {";
    for (std::size_t i = 0; i < bad.size(); ++i) d << (i ? "," : "") << bad[i];
    d << "}; max |Gamma-1| at M=1e4: " << fmt("%.4f", worst);
    return Verdict{bad.empty() && worst < 0.05, d.str()};
  });

  report(8, "R(r) minimum at r_opt(0.3)", 5.0, [] {
    const double phi = 0.3, step = 0.01;
    const double r_opt = optimal_squeezing(phi);
    double best_r = 0.0, best = INFINITY, lowest = INFINITY;
    for (int i = 0; i <= 140; ++i) {
      const double r = 0.1 + step * i;
      const double v = ratio_R(r, phi, 100);
      lowest = std::min(lowest, v);
      if (v < best) best = v, best_r = r;
    }
    const double at_opt = ratio_R(r_opt, phi, 100);
    const bool ok = std::abs(best_r - r_opt) <= step + 1e-12 && std::abs(at_opt - 1.0) < 1e-9 && lowest >= 1.0 - 1e-12;
    return Verdict{ok, fmt("argmin %.2f vs r_opt %.6f; R(r_opt)-1 = %.1e", best_r, r_opt, at_opt - 1.0) +
                           fmt(", min R %.12f", lowest)};
  });

  std::vector<std::string> csv_first;
  report(9, "adaptive benefit (phase retune)", 300.0, [&] {
    bool ok = true;
    std::ostringstream d;
    for (double r : {0.6, 0.3}) {
      const auto base = run_experiment(fig5_config(r, Scheme::None));
      const auto adap = run_experiment(fig5_config(r, Scheme::PhaseRetune));
      std::ostringstream csv;
      write_csv(adap, csv);
      csv_first.push_back(csv.str());
      int violations = 0;
      double worst_gap = -INFINITY;
      for (std::size_t i = 0; i < base.aggregates.size(); ++i) {
        const auto& b = base.aggregates[i];
        const auto& a = adap.aggregates[i];
        const double gap = (a.v - b.v) / std::hypot(a.v_stderr, b.v_stderr);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 2.0) ++violations;
      }
      const auto& lb = base.aggregates.back();
      const auto& la = adap.aggregates.back();
      const bool a_ok = std::abs(lb.a - 1.0) <= 0.05 && std::abs(la.a - 1.0) <= 0.05;
      const double inj = injected_stage2_ratio(r, 0.7, la.m, 20);
      const bool inj_ok = std::abs(inj - 1.0) <= 0.10;
      ok = ok && violations == 0 && a_ok && inj_ok;
      d << fmt("r=%.1f: max (V_ad-V_none)/SE %.2f", r, worst_gap) << fmt(", A %.4f/%.4f", la.a, lb.a)
        << fmt(", V(2048) %.3f vs %.3f", la.v, lb.v) << fmt(", injected ratio %.3f; ", inj);
    }
    return Verdict{ok, d.str()};
  });

  report(10, "determinism of criterion 9 CSV", 300.0, [&] {
    bool same = csv_first.size() == 2;
    std::size_t i = 0;
    for (double r : {0.6, 0.3}) {
      auto cfg = fig5_config(r, Scheme::PhaseRetune);
      cfg.threads = 1;
      std::ostringstream csv;
      write_csv(run_experiment(cfg), csv);
      same = same && i < csv_first.size() && csv.str() == csv_first[i];
      ++i;
    }
    return Verdict{same, same ? "byte-identical across reruns (and thread counts)" : "CSV differs"};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
