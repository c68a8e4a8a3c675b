#pragma once

#include <array>
#include <span>

#include "sbdf/grid.hpp"

namespace sbdf {

inline constexpr int kMaxOrder = 4;

/// Coefficients of the stabilised BDFk scheme.
struct SchemeCoeffs {
  int k = 1;
  /// BDF weights a_{0,k} .. a_{k,k}; entries past k are zero.
  std::array<double, kMaxOrder + 1> a{};
  /// Stabilisation scale beta_k.
  double beta = 1.0;
  /// Signed binomials (-1)^l C(k, l), l = 0..k.
  std::array<double, kMaxOrder + 1> stab{};

  double a0() const { return a[0]; }
};

/// Throws std::invalid_argument for k outside 1..4.
SchemeCoeffs scheme_coeffs(int k);

/// k-th backward difference sum_j (-1)^j C(k, j) levels[j], newest level
/// first; `levels` holds k+1 fields.
Field backward_difference(std::span<const Field> levels);

/// A_k = 4 beta_k alpha dt / h^2 + 2 beta_k B dt.
double stabilised_diffusion_weight(const SchemeCoeffs& c, double alpha, double B, double dt, double h);

/// rho_k = A_k / (beta_k a_{0,k} + A_k), always in [0, 1).
double contraction_factor(int k, double alpha, double B, double dt, double h);

/// beta_k a_{0,k} + A_k, the divisor of the fixed-point update.
double update_divisor(const SchemeCoeffs& c, double alpha, double B, double dt, double h);

}  // namespace sbdf
