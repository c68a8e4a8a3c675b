#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "sbdf/scheme.hpp"
#include "support.hpp"

using namespace sbdf;

TEST_CASE("BDF coefficients") {
  const SchemeCoeffs c2 = scheme_coeffs(2);
  CHECK(c2.a[0] == 1.5);
  CHECK(c2.a[1] == -2.0);
  CHECK(c2.a[2] == 0.5);
  CHECK(c2.beta == 2.0);

  const SchemeCoeffs c4 = scheme_coeffs(4);
  CHECK(c4.a[0] == doctest::Approx(25.0 / 12.0).epsilon(1e-16));
  CHECK(c4.a[1] == -4.0);
  CHECK(c4.a[2] == 3.0);
  CHECK(c4.a[3] == doctest::Approx(-4.0 / 3.0).epsilon(1e-16));
  CHECK(c4.a[4] == 0.25);
  CHECK(c4.beta == 12.0);

  // beta_k a_{l,k} are the integer weights of the cleared-denominator forms.
  const double scaled[5][5] = {{}, {1, -1}, {3, -4, 1}, {11, -18, 9, -2}, {25, -48, 36, -16, 3}};
  for (int k = 1; k <= 4; ++k) {
    const SchemeCoeffs c = scheme_coeffs(k);
    double sum = 0.0;
    for (int l = 0; l <= k; ++l) {
      sum += c.a[l];
      CHECK(c.beta * c.a[l] == doctest::Approx(scaled[k][l]).epsilon(1e-15));
    }
    CHECK(std::abs(sum) < 1e-15);
  }
  CHECK_THROWS_AS(scheme_coeffs(0), std::invalid_argument);
  CHECK_THROWS_AS(scheme_coeffs(5), std::invalid_argument);
}

TEST_CASE("backward differences") {
  const GridSpec g = testing::grid(3, 3, 1.0, Boundary::Periodic);
  auto levels = [&](std::vector<double> v) {
    std::vector<Field> out;
    for (double x : v) out.emplace_back(g, x);
    return out;
  };
  SUBCASE("k=1 constant") {
    const auto l = levels({0.7, 0.7});
    const Field d = backward_difference(l);
    for (double v : d.values()) CHECK(v == 0.0);
  }
  SUBCASE("k=2 linear") {
    const auto l = levels({2, 1, 0});
    const Field d = backward_difference(l);
    for (double v : d.values()) CHECK(v == 0.0);
  }
  SUBCASE("k=3 cubic") {
    const auto l = levels({27, 8, 1, 0});
    const Field d = backward_difference(l);
    for (double v : d.values()) CHECK(v == 6.0);
  }
  SUBCASE("degree < k is annihilated exactly") {
    for (int k = 1; k <= 4; ++k) {
      for (int deg = 0; deg < k; ++deg) {
        std::vector<double> v;
        for (int j = 0; j <= k; ++j) {
          double p = 1.0;
          const double t = 5.0 - j;
          for (int d = 0; d < deg; ++d) p *= t;
          v.push_back(3.0 * p + 2.0);
        }
        const auto l = levels(v);
        const Field d = backward_difference(l);
    for (double x : d.values()) CHECK(x == 0.0);
      }
    }
  }
}

TEST_CASE("contraction factor") {
  CHECK(contraction_factor(3, 0.0, 0.0, 0.1, 0.5) == 0.0);
  CHECK(contraction_factor(1, 1.0, 2.0, 0.1, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const SchemeCoeffs c = scheme_coeffs(1);
  CHECK(stabilised_diffusion_weight(c, 1.0, 2.0, 0.1, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  for (int k = 1; k <= 4; ++k) CHECK(contraction_factor(k, 1e2, 1e2, 1e2, 1e-2) < 1.0);
  CHECK_THROWS(contraction_factor(2, -1.0, 0.0, 0.1, 0.1));
  CHECK_THROWS(contraction_factor(2, 1.0, 0.0, 0.0, 0.1));
  CHECK(update_divisor(scheme_coeffs(4), 1.0, 2.0, 0.1, 0.5) == doctest::Approx(25 + 48 * 0.1 / 0.25 + 24 * 0.2));
}
