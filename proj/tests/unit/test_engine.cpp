#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "sbdf/engine.hpp"
#include "sbdf/errors.hpp"
#include "sbdf/parallel.hpp"
#include "support.hpp"

using namespace sbdf;

namespace {

// Allen-Cahn with diffusion switched off: constant fields on an all-Neumann
// grid then follow the scalar ODE u' = u - u^3.
NonlinearModel scalar_ac(double B = 2.0) {
  NonlinearModel m = allen_cahn(0.01, B);
  m.alpha = 0.0;
  return m;
}

// f = (B/2)(u - u^3): |f'| <= B on [-1, 1] for any B > 0.
NonlinearModel scaled_ac(double alpha, double B) {
  NonlinearModel m;
  m.name = "scaled_ac";
  m.f = [B](double u) { return 0.5 * B * (u - u * u * u); };
  m.B = B;
  m.alpha = alpha;
  return m;
}

History constant_history(const GridSpec& g, std::vector<double> values, double dt) {
  History h;
  for (double v : values) h.levels.emplace_back(g, v);
  h.dt = dt;
  return h;
}

History random_history(const GridSpec& g, int k, double dt, std::mt19937_64& rng) {
  History h;
  for (int l = 0; l < k; ++l) h.levels.push_back(testing::random_field(g, rng));
  h.dt = dt;
  return h;
}

// Cleared-denominator per-order fixed-point update, written out term by term.
Field literal_update(int k, const History& h, const Field& cur, const NonlinearModel& m) {
  const double dt = h.dt, B = m.B, r = m.alpha * dt / (cur.grid().h * cur.grid().h);
  const Field S = neighbor_sum(cur);
  Field out(cur.grid());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double N = m.f(cur[n]) + B * cur[n];
    double p[4] = {};
    for (int l = 0; l < k; ++l) p[l] = h.levels[l][n];
    double v = 0.0;
    switch (k) {
      case 1:
        v = ((1 + B * dt) * p[0] + r * S[n] + dt * N) / (1 + 4 * r + 2 * B * dt);
        break;
      case 2:
        v = ((4 + 4 * B * dt) * p[0] - (1 + 2 * B * dt) * p[1] + 2 * r * S[n] + 2 * dt * N) /
            (3 + 8 * r + 4 * B * dt);
        break;
      case 3:
        v = ((18 + 18 * B * dt) * p[0] - (9 + 18 * B * dt) * p[1] + (2 + 6 * B * dt) * p[2] + 6 * r * S[n] +
             6 * dt * N) /
            (11 + 24 * r + 12 * B * dt);
        break;
      case 4:
        v = ((48 + 48 * B * dt) * p[0] - (36 + 72 * B * dt) * p[1] + (16 + 48 * B * dt) * p[2] -
             (3 + 12 * B * dt) * p[3] + 12 * r * S[n] + 12 * dt * N) /
            (25 + 48 * r + 24 * B * dt);
        break;
    }
    out[n] = v;
  }
  out.enforce_dirichlet();
  return out;
}

double bisect(double (*g)(double), double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// u(t) for u' = u - u^3, u(0) = u0.
double ac_ode_exact(double u0, double t) {
  const double e = std::exp(2.0 * t);
  return u0 * std::exp(t) / std::sqrt(1.0 + u0 * u0 * (e - 1.0));
}

}  // namespace

TEST_CASE("history term") {
  const GridSpec g = testing::grid(2, 2, 1.0, Boundary::NeumannZero);
  SUBCASE("k=1") {
    const Field H = history_term(scheme_coeffs(1), constant_history(g, {0.5}, 1.0), 2.0);
    for (double v : H.values()) CHECK(v == 1.5);
  }
  SUBCASE("k=2 without stabilisation") {
    const Field H = history_term(scheme_coeffs(2), constant_history(g, {1.0, 1.0}, 0.3), 0.0);
    for (double v : H.values()) CHECK(v == doctest::Approx(4.0 - 1.0));
  }
  SUBCASE("k=2 matches the literal weights") {
    const double dt = 0.37, B = 2.0;
    const Field H = history_term(scheme_coeffs(2), constant_history(g, {0.8, -0.2}, dt), B);
    const double want = (4 + 4 * B * dt) * 0.8 - (1 + 2 * B * dt) * -0.2;
    for (double v : H.values()) CHECK(v == doctest::Approx(want).epsilon(1e-15));
  }
  SUBCASE("zero history") {
    const Field H = history_term(scheme_coeffs(3), constant_history(g, {0, 0, 0}, 0.1), 2.0);
    for (double v : H.values()) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(history_term(scheme_coeffs(3), constant_history(g, {0, 0}, 0.1), 2.0), std::invalid_argument);
}

TEST_CASE("fixed-point update") {
  const GridSpec g = testing::grid(2, 2, 1.0, Boundary::NeumannZero);
  const NonlinearModel m = scalar_ac();
  SUBCASE("scalar sBDF1 sweep") {
    const Field out = fpi_update(scheme_coeffs(1), constant_history(g, {0.5}, 1.0), Field(g, 0.5), m);
    for (double v : out.values()) CHECK(v == doctest::Approx(0.575).epsilon(1e-15));
  }
  SUBCASE("origin is fixed") {
    const Field out = fpi_update(scheme_coeffs(2), constant_history(g, {0, 0}, 1.0), Field(g), m);
    for (double v : out.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("unified update agrees with the per-order literal forms") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 1; k <= 4; ++k) {
    for (int r = 0; r < 20; ++r) {
      const GridSpec g = (r % 2) ? testing::mixed_grid(9, 1.0 / 8) : testing::grid(8, 6, 0.1, Boundary::Periodic);
      const NonlinearModel m = scaled_ac(10.0 * U(rng), 0.5 + 5.0 * U(rng));
      const History h = random_history(g, k, 0.01 + U(rng), rng);
      const Field cur = testing::random_field(g, rng);
      const Field a = fpi_update(scheme_coeffs(k), h, cur, m);
      const Field b = literal_update(k, h, cur, m);
      for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-14 * (1.0 + std::abs(b[n])));
    }
  }
}

TEST_CASE("cut-off") {
  const GridSpec g = testing::grid(3, 1 + 1, 1.0, Boundary::Periodic);
  Field u(g, {1.5, -2.0, 0.3, 1.0, -1.0, 0.0});
  const Field c = cutoff(u, -1.0, 1.0);
  CHECK(c[0] == 1.0);
  CHECK(c[1] == -1.0);
  CHECK(c[2] == 0.3);
  CHECK(cutoff(c, -1.0, 1.0) == c);
}

TEST_CASE("one fixed-point sweep contracts by rho") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 1; k <= 4; ++k) {
    const SchemeCoeffs c = scheme_coeffs(k);
    for (int r = 0; r < 40; ++r) {
      const double h = (r % 2) ? 1.0 / 16 : 1.0 / 64;
      const int n = (r % 2) ? 17 : 33;
      const GridSpec g = (r % 3 == 0) ? testing::grid(n, n, h, Boundary::Periodic)
                                      : testing::grid(n, n, h, (r % 3 == 1) ? Boundary::DirichletZero : Boundary::NeumannZero);
      const double alpha = 10.0 * (1.0 - U(rng)), B = 10.0 * (1.0 - U(rng)), dt = 10.0 * (1.0 - U(rng));
      const NonlinearModel m = scaled_ac(alpha, B);
      const Field H = history_term(c, random_history(g, k, dt, rng), B);
      const Field u = testing::random_field(g, rng), v = testing::random_field(g, rng);
      const double lip = l2_distance(cutoff(fpi_update(c, H, dt, u, m), -1, 1), cutoff(fpi_update(c, H, dt, v, m), -1, 1));
      CHECK(lip <= contraction_factor(k, alpha, B, dt, h) * l2_distance(u, v) + 1e-12);
    }
  }
}

TEST_CASE("scalar sBDF1 step converges to the implicit root") {
  const GridSpec g = testing::grid(2, 2, 1.0, Boundary::NeumannZero);
  const SchemeCoeffs c = scheme_coeffs(1);
  StepConfig cfg;
  cfg.cutoff_enabled = false;
  const auto res = step(c, constant_history(g, {0.5}, 1.0), scalar_ac(), cfg);
  const double root = bisect([](double x) { return x * x * x + 2.0 * x - 1.5; }, 0.0, 1.0);
  CHECK(root == doctest::Approx(0.62695).epsilon(1e-4));
  const double rho = contraction_factor(1, 0.0, 2.0, 1.0, 1.0);
  CHECK(res.report.rho == rho);
  CHECK(res.report.tol == 1.0);  // C min(dt^2, h^2)
  // Fixed-point error <= rho/(1-rho) * last increment, and the increment is below tol.
  CHECK(std::abs(res.value[0] - root) * 2.0 <= res.report.tol_effective / (1.0 - rho));
  CHECK(res.report.last_increment < res.report.tol_effective);

  cfg.tol_const = 1e-12;
  const auto tight = step(c, constant_history(g, {0.5}, 1.0), scalar_ac(), cfg);
  for (double v : tight.value.values()) CHECK(v == doctest::Approx(root).epsilon(1e-11));
}

TEST_CASE("zero data stays zero after one iteration") {
  const GridSpec g = testing::mixed_grid(9, 0.125);
  for (int k = 1; k <= 4; ++k) {
    History h = constant_history(g, std::vector<double>(k, 0.0), 0.1);
    const auto res = step(scheme_coeffs(k), h, allen_cahn(0.01), StepConfig{});
    CHECK(res.report.iters == 1);
    CHECK(linf_norm(res.value) == 0.0);
  }
}

TEST_CASE("increments decrease geometrically and iterates respect the bound") {
  std::mt19937_64 rng(9);
  const GridSpec g = testing::mixed_grid(17, 1.0 / 16);
  const NonlinearModel m = allen_cahn(0.05);
  for (int k = 1; k <= 4; ++k) {
    for (double dt : {1e-3, 1.0, 1e3}) {
      const History h = random_history(g, k, dt, rng);
      StepConfig cfg;
      cfg.cutoff_enabled = k > 1;
      cfg.tol_const = 1e-3;
      cfg.max_iters = 100000;
      double worst = 0.0;
      const auto res = step(scheme_coeffs(k), h, m, cfg, [&](const IterateEvent& ev) {
        worst = std::max(worst, linf_norm(ev.next));
      });
      CHECK(worst <= 1.0 + 1e-15);
      const double rho = res.report.rho;
      const auto& inc = res.report.increments;
      for (std::size_t i = 1; i < inc.size(); ++i) CHECK(inc[i] <= rho * inc[i - 1] + 1e-15);
    }
  }
}

TEST_CASE("sBDF1 implicit residual is bounded by the termination tolerance") {
  std::mt19937_64 rng(13);
  const GridSpec g = testing::grid(16, 16, 1.0 / 16, Boundary::Periodic);
  const NonlinearModel m = allen_cahn(0.05);
  const SchemeCoeffs c = scheme_coeffs(1);
  for (int r = 0; r < 10; ++r) {
    History h;
    h.levels.push_back(testing::random_field(g, rng, -0.8, 0.8));
    h.dt = 0.05;
    StepConfig cfg;
    cfg.cutoff_enabled = false;
    const auto res = step(c, h, m, cfg);
    const double D = update_divisor(c, m.alpha, m.B, h.dt, g.h);
    CHECK(res.report.implicit_residual <= D * res.report.tol_effective / (1.0 - res.report.rho));
  }
}

TEST_CASE("iteration cap raises SolverError") {
  std::mt19937_64 rng(2);
  const GridSpec g = testing::grid(8, 8, 0.125, Boundary::Periodic);
  StepConfig cfg;
  cfg.max_iters = 1;
  cfg.tol_const = 1e-12;
  try {
    step(scheme_coeffs(2), random_history(g, 2, 0.5, rng), allen_cahn(0.1), cfg);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.last_increment() > 0.0);
    CHECK(e.rho() > 0.0);
    CHECK(e.rho() < 1.0);
  }
}

TEST_CASE("bootstrap") {
  const GridSpec g = testing::mixed_grid(9, 0.125);
  const NonlinearModel m = allen_cahn(0.05);
  const Field u0 = ac_initial(g);
  SUBCASE("k=1 is the initial level") {
    BootstrapReport rep;
    const History h = bootstrap(m, u0, 1, 0.1, StepConfig{}, &rep);
    REQUIRE(h.order() == 1);
    CHECK(h.levels[0] == u0);
    CHECK(h.t == 0.0);
    CHECK(rep.fine_steps == 0);
  }
  SUBCASE("zero data") {
    const History h = bootstrap(m, Field(g), 4, 0.1, StepConfig{});
    REQUIRE(h.order() == 4);
    for (const auto& l : h.levels) CHECK(linf_norm(l) == 0.0);
    CHECK(h.t == doctest::Approx(0.3));
  }
  CHECK(bootstrap_substeps(1, 0.1) == 1);
  CHECK(bootstrap_substeps(2, 0.1) == 1);
  CHECK(bootstrap_substeps(3, 0.01) == 10);
  CHECK(bootstrap_substeps(4, 0.01) == 100);
  CHECK(bootstrap_substeps(4, 2.0) == 1);
}

TEST_CASE("scalar ODE: observed orders match k") {
  const GridSpec g = testing::grid(2, 2, 1.0, Boundary::NeumannZero);
  const NonlinearModel m = scalar_ac();
  const double u0 = 0.2, T = 1.0;
  const double exact = ac_ode_exact(u0, T);
  StepConfig cfg;
  cfg.tol_const = 1e-8;
  cfg.max_iters = 10000;
  for (int k = 1; k <= 4; ++k) {
    std::vector<double> err;
    for (double dt : {0.0125, 0.00625, 0.003125}) {
      Integrator it(m, Field(g, u0), k, dt, cfg);
      const int steps = static_cast<int>(std::lround(T / dt));
      while (it.history().t < T - 0.5 * dt) it.advance();
      CHECK(it.time() == doctest::Approx(steps * dt));
      err.push_back(std::abs(it.current()[0] - exact));
    }
    const double order = std::log2(err[1] / err[2]);
    CAPTURE(err[0]);
    CAPTURE(err[2]);
    CHECK(order >= k - 0.2);
    CHECK(order <= k + 0.5);
  }
}

TEST_CASE("a u' = const solution linear in time is reproduced exactly") {
  // f = c constant (B = 0, alpha = 0): every BDF step of a linear-in-time
  // solution is exact, whatever the order.
  NonlinearModel m;
  m.f = [](double) { return 0.25; };
  m.B = 0.0;
  m.lo = -1e9;
  m.hi = 1e9;
  m.alpha = 0.0;
  const GridSpec g = testing::grid(2, 2, 1.0, Boundary::NeumannZero);
  StepConfig cfg;
  cfg.cutoff_enabled = false;
  for (int k = 1; k <= 4; ++k) {
    Integrator it(m, Field(g, 0.1), k, 0.1, cfg);
    for (int s = 0; s < 10; ++s) it.advance();
    CHECK(it.current()[0] == doctest::Approx(0.1 + 0.25 * it.time()).epsilon(1e-14));
  }
}

TEST_CASE("integrator output is independent of the thread count") {
  const GridSpec g = testing::mixed_grid(96, 1.0 / 95);
  const NonlinearModel m = allen_cahn(0.01);
  auto march = [&] {
    Integrator it(m, ac_initial(g), 3, 0.1, StepConfig{});
    for (int s = 0; s < 5; ++s) it.advance();
    return it.current();
  };
  set_thread_count(1);
  const Field a = march();
  set_thread_count(3);
  const Field b = march();
  set_thread_count(1);
  CHECK(a == b);
}
