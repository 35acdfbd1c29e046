#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "phaseest/errors.hpp"
#include "phaseest/probe.hpp"

using namespace phaseest;

namespace {

// Photon-number variance of D(α)S(ξ)|0⟩ in a truncated Fock space, with
// S(ξ) = exp(½ξ a†² - ½ξ* a²), ξ = r e^{-2iϕ}.
double fock_number_variance(double r, double varphi, std::complex<double> alpha) {
  constexpr int n = 140;
  using Mat = Eigen::MatrixXcd;
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Mat ad = a.adjoint();
  const std::complex<double> xi = std::polar(r, -2.0 * varphi);
  const Mat s_gen = 0.5 * xi * ad * ad - 0.5 * std::conj(xi) * a * a;
  const Mat d_gen = alpha * ad - std::conj(alpha) * a;
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(n);
  vac(0) = 1.0;
  const Eigen::VectorXcd psi = d_gen.exp() * (s_gen.exp() * vac);
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double p = std::norm(psi(k));
    m1 += k * p;
    m2 += static_cast<double>(k) * k * p;
  }
  return m2 - m1 * m1;
}

}  // namespace

TEST_CASE("probe_covariance of vacuum and squeezed states") {
  const auto vac = probe_covariance(squeezed_vacuum(0.0));
  CHECK(vac.s11 == doctest::Approx(0.25));
  CHECK(vac.s22 == doctest::Approx(0.25));
  CHECK(vac.s12 == 0.0);

  const auto sq = probe_covariance(squeezed_vacuum(0.7));
  CHECK(sq.s11 == doctest::Approx(std::exp(-1.4) / 4).epsilon(1e-14));
  CHECK(sq.s22 == doctest::Approx(std::exp(1.4) / 4).epsilon(1e-14));

  CHECK(probe_covariance(squeezed_vacuum(1.5)).det() == doctest::Approx(1.0 / 16).epsilon(1e-13));
}

TEST_CASE("probe_covariance rejects non-canonical frames and bad r") {
  CHECK_THROWS_AS(probe_covariance(Probe{.r = 0.5, .varphi = 0.1}), DomainError);
  CHECK_THROWS_AS(probe_covariance(Probe{.r = 0.5, .alpha_re = 1.0}), DomainError);
  CHECK_THROWS_AS(probe_covariance(Probe{.r = std::nan("")}), DomainError);
  CHECK_THROWS_AS(squeezed_vacuum(-0.1), DomainError);
}

TEST_CASE("phase_shifted_covariance at the special phases") {
  // φ = 0: σ_0 with its two axes exchanged.
  const auto base = probe_covariance(squeezed_vacuum(0.7));
  const auto zero = phase_shifted_covariance(squeezed_vacuum(0.7), 0.0);
  CHECK(zero.s11 == doctest::Approx(base.s22).epsilon(1e-15));
  CHECK(zero.s22 == doctest::Approx(base.s11).epsilon(1e-15));
  CHECK(zero.s12 == doctest::Approx(0.0));

  for (double r : {0.1, 0.6, 1.3}) {
    const auto q = phase_shifted_covariance(squeezed_vacuum(r), M_PI / 4);
    CHECK(q.s11 == doctest::Approx(std::cosh(2 * r) / 4).epsilon(1e-14));
    CHECK(q.s22 == doctest::Approx(std::cosh(2 * r) / 4).epsilon(1e-14));
    CHECK(q.s12 == doctest::Approx(std::sinh(2 * r) / 4).epsilon(1e-14));
  }
  CHECK_THROWS_AS(phase_shifted_covariance(squeezed_vacuum(0.5), -0.01), DomainError);
  CHECK_THROWS_AS(phase_shifted_covariance(squeezed_vacuum(0.5), 1.6), DomainError);
}

TEST_CASE("phase_shifted_covariance matches the rotation oracle") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> rd(0.0, 2.0), pd(0.0, M_PI / 2);
  std::vector<std::pair<double, double>> points{{0.6, 0.3}};
  for (int i = 0; i < 50; ++i) points.emplace_back(rd(gen), pd(gen));
  for (auto [r, phi] : points) {
    // swap(σ_0) = ¼ diag(e^{2r}, e^{-2r})
    const oracle::Mat2 swapped{{{std::exp(2 * r) / 4, 0.0}, {0.0, std::exp(-2 * r) / 4}}};
    const auto want = oracle::rotate(swapped, phi);
    const auto got = phase_shifted_covariance(squeezed_vacuum(r), phi);
    CHECK(got.s11 == doctest::Approx(want[0][0]).epsilon(1e-12));
    CHECK(got.s12 == doctest::Approx(want[0][1]).epsilon(1e-12).scale(1.0));
    CHECK(got.s22 == doctest::Approx(want[1][1]).epsilon(1e-12));
    CHECK(want[0][1] == doctest::Approx(want[1][0]));
  }
}

TEST_CASE("purity and trace are phase independent") {
  for (double r = 0.0; r <= 2.0; r += 0.25) {
    for (double phi = 0.0; phi <= M_PI / 2; phi += 0.1) {
      const auto c = phase_shifted_covariance(squeezed_vacuum(r), phi);
      CHECK(std::abs(c.det() - 1.0 / 16) < 1e-12 * std::cosh(2 * r) * std::cosh(2 * r));
      CHECK(c.trace() == doctest::Approx(std::cosh(2 * r) / 2).epsilon(1e-13));
      CHECK(c.s11 > 0.0);
      CHECK(c.s22 > 0.0);
    }
  }
}

TEST_CASE("energy_fluctuation closed values") {
  CHECK(energy_fluctuation(squeezed_vacuum(0.0)) == 0.0);
  CHECK(energy_fluctuation(squeezed_vacuum(0.6)) == doctest::Approx(0.5 * std::pow(std::sinh(1.2), 2)));
  CHECK(energy_fluctuation(squeezed_vacuum(0.6)) == doctest::Approx(1.13924).epsilon(1e-5));
  // Coherent state: Poissonian, ΔG² = |α|².
  CHECK(energy_fluctuation(Probe{.r = 0.0, .alpha_re = 1.2, .alpha_im = -0.5}) ==
        doctest::Approx(1.69));
  // Independent of varphi when α = 0.
  for (double vp : {0.0, 0.4, 1.0, 2.5}) {
    CHECK(energy_fluctuation(Probe{.r = 0.8, .varphi = vp}) ==
          doctest::Approx(energy_fluctuation(squeezed_vacuum(0.8))).epsilon(1e-14));
  }
}

TEST_CASE("energy_fluctuation agrees with a Fock-space computation") {
  struct Case {
    double r, varphi;
    std::complex<double> alpha;
  };
  const Case cases[] = {{0.3, 0.4, {0.7, 0.2}},  {0.5, 1.1, {-0.3, 0.8}}, {0.0, 0.0, {1.0, 0.0}},
                        {0.4, M_PI / 2, {0.6, 0.0}}, {0.6, 2.0, {0.1, -0.9}}, {0.7, 0.0, {0.0, 0.0}}};
  for (const auto& c : cases) {
    const Probe p{.r = c.r, .varphi = c.varphi, .alpha_re = c.alpha.real(), .alpha_im = c.alpha.imag()};
    CHECK(energy_fluctuation(p) == doctest::Approx(fock_number_variance(c.r, c.varphi, c.alpha)).epsilon(1e-9));
  }
}

TEST_CASE("at fixed energy the fluctuation is maximal with all energy in squeezing") {
  for (double energy : {0.2, 1.0, 3.0}) {
    const double r_all = std::asinh(std::sqrt(energy));
    const double best = energy_fluctuation(squeezed_vacuum(r_all));
    // Grid over the split and over displacement and squeezing directions.
    for (int k = 0; k < 40; ++k) {
      const double r = r_all * k / 40.0;
      const double amp = std::sqrt(energy - std::pow(std::sinh(r), 2));
      for (double beta = 0.0; beta < 2 * M_PI; beta += 0.2) {
        for (double vp = 0.0; vp < M_PI; vp += 0.3) {
          const Probe p{.r = r, .varphi = vp, .alpha_re = amp * std::cos(beta), .alpha_im = amp * std::sin(beta)};
          CHECK(p.energy() == doctest::Approx(energy));
          CHECK(energy_fluctuation(p) <= best * (1 + 1e-12));
        }
      }
    }
  }
}
