#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "sbdf/models.hpp"
#include "support.hpp"

using namespace sbdf;

TEST_CASE("Allen-Cahn reaction") {
  CHECK(ac_reaction(0.0) == 0.0);
  CHECK(ac_reaction(1.0) == 0.0);
  CHECK(ac_reaction(0.5) == 0.375);
  const NonlinearModel m = allen_cahn(0.01);
  CHECK(m.alpha == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(m.B == 2.0);
  CHECK(m.lo == -1.0);
  CHECK(m.hi == 1.0);
}

TEST_CASE("Allen-Cahn modified reaction bounds") {
  const NonlinearModel m = allen_cahn(0.01);
  double peak = 0.0, quotient = 0.0;
  const int n = 20001;
  for (int a = 0; a < n; ++a) {
    const double u = -1.0 + 2.0 * a / (n - 1);
    peak = std::max(peak, std::abs(m.modified(u)));
    if (a > 0) {
      const double v = -1.0 + 2.0 * (a - 1) / (n - 1);
      quotient = std::max(quotient, std::abs(m.modified(u) - m.modified(v)) / (u - v));
    }
  }
  CHECK(peak == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quotient <= 2.0 * m.B);
}

TEST_CASE("model registration") {
  CHECK(check_model(allen_cahn(0.01)).ok());
  NonlinearModel soft = allen_cahn(0.01);
  soft.B = 1.0;
  const ModelCheck weak = check_model(soft);
  CHECK_FALSE(weak.lipschitz_ok);
  CHECK(weak.max_slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(register_model(soft), std::invalid_argument);
  CHECK_THROWS_AS(allen_cahn(0.01, 1.0), std::invalid_argument);

  NonlinearModel wrong_sign = allen_cahn(0.01);
  wrong_sign.f = [](double u) { return ac_reaction(u) + 0.5; };
  CHECK_FALSE(check_model(wrong_sign).sign_ok);
}

TEST_CASE("Allen-Cahn initial data") {
  const GridSpec g = testing::mixed_grid(5, 0.25);
  const Field u0 = ac_initial(g);
  for (int j = 0; j < 5; ++j) CHECK(u0(0, j) == 0.0);
  CHECK(u0(2, 0) == doctest::Approx(0.1).epsilon(1e-15));
  const Field big = ac_initial(testing::mixed_grid(128, 1.0 / 127));
  CHECK(linf_norm(big) <= 0.1);
  CHECK(linf_norm(big) > 0.0999);
}

TEST_CASE("piecewise-linear table and schedule") {
  const PiecewiseLinear t{{0.0, 0.5, 1.0}, {-1.0, 1.0, 2.0}};
  CHECK(t(-3.0) == -1.0);
  CHECK(t(0.25) == doctest::Approx(0.0));
  CHECK(t(0.75) == doctest::Approx(1.5));
  CHECK(t(9.0) == 2.0);
  CHECK_THROWS(PiecewiseLinear{{0.0, 0.0}, {1.0, 2.0}}.validate("t"));

  Schedule s;
  s.base = 0.0;
  s.windows = {{1.0, 2.0, 1.0}, {5.0, 6.0, 0.5}};
  CHECK(s(0.5) == 0.0);
  CHECK(s(1.0) == 1.0);
  CHECK(s(2.0) == 0.0);
  CHECK(s(5.5) == 0.5);
}

TEST_CASE("prostate reactions") {
  const ProstateParams p = illustrative_prostate_params();
  const GridSpec gphi = prostate_phi_grid(5, 10.0);
  const GridSpec gn = prostate_neumann_grid(5, 10.0);
  SUBCASE("all zero") {
    const auto r = prostate_reactions(Field(gphi), Field(gn), Field(gn), 0.0, p);
    for (double v : r.phi.values()) CHECK(v == 0.0);
    for (double v : r.sigma.values()) CHECK(v == p.S_h);
    for (double v : r.p.values()) CHECK(v == p.alpha_h);
  }
  SUBCASE("phi = 1") {
    const auto r = prostate_reactions(Field(gphi, 1.0), Field(gn, 0.4), Field(gn, 0.2), 0.0, p);
    for (std::size_t n = 0; n < r.phi.size(); ++n) CHECK(r.phi[n] == 0.0);
  }
  SUBCASE("generic point") {
    ProstateParams q = p;
    q.u_drug.windows = {{0.0, 10.0, 1.0}};
    const double phi = 0.3, sigma = 0.7, psa = 0.4, t = 2.0;
    const double m = 0.2 + (0.4 - 0.2) * (sigma - 0.5) / 0.5;  // table value at 0.7
    const double mu = m - q.m_ref * 1.0;
    const double f_phi = -2 * q.M * phi * (1 - phi) * (1 - 2 * phi - 3 * mu);
    const double f_sigma = q.S_h * (1 - phi) + (q.S_c - q.s) * phi - (q.gamma_h * (1 - phi) + q.gamma_c * phi) * sigma;
    const double f_p = -q.gamma_p * psa + q.alpha_h * (1 - phi) + q.alpha_c * phi;
    CHECK(prostate_phi_reaction(phi, sigma, q.u_drug(t), q) == doctest::Approx(f_phi).epsilon(1e-14));
    CHECK(prostate_sigma_reaction(phi, sigma, q) == doctest::Approx(f_sigma).epsilon(1e-14));
    CHECK(prostate_p_reaction(phi, psa, q) == doctest::Approx(f_p).epsilon(1e-14));
  }
}

TEST_CASE("healthy tissue is an equilibrium of the illustrative set") {
  const ProstateParams p = illustrative_prostate_params();
  CHECK(prostate_sigma_reaction(0.0, 1.0, p) == doctest::Approx(0.0).scale(1.0));
  CHECK(prostate_p_reaction(0.0, 0.0625, p) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("prostate Lipschitz estimate dominates difference quotients") {
  const ProstateParams p = illustrative_prostate_params();
  const double L = prostate_phi_lipschitz(p, 0.0, 1.0);
  double worst = 0.0;
  for (double sigma : {0.0, 0.3, 0.77, 1.0})
    for (int a = 0; a < 1000; ++a) {
      const double x = a / 1000.0, y = (a + 1) / 1000.0;
      worst = std::max(worst, std::abs(prostate_phi_reaction(y, sigma, 0.0, p) - prostate_phi_reaction(x, sigma, 0.0, p)) / (y - x));
    }
  CHECK(worst <= L * (1.0 + 1e-3));
  CHECK(worst >= 0.95 * L);
}

TEST_CASE("prostate initial data") {
  const int n = 257;
  const double h = 3000.0 / 256;
  const auto f = prostate_initials(n, h);
  const int c = (n - 1) / 2;
  CHECK(f.phi(c, c) == doctest::Approx(0.5 - 0.5 * std::tanh(-1.0)).epsilon(1e-14));
  CHECK(f.phi(c, c) == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(f.phi(5, 5) < 1e-30);
  CHECK(f.sigma(5, 5) == doctest::Approx(1.0));
  CHECK(f.p(5, 5) == doctest::Approx(0.0625));
  CHECK(f.sigma(c, c) == doctest::Approx(1.0 - 0.8 * f.phi(c, c)));
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) {
      CHECK(f.phi(i, j) > 0.0);
      CHECK(f.phi(i, j) < 1.0);
    }
  CHECK(f.phi(0, c) == 0.0);  // Dirichlet edge
  CHECK(f.sigma.grid().bc == BoundarySpec::uniform(Boundary::NeumannZero));
}
