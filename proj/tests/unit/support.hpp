#pragma once

#include <cmath>
#include <random>

#include "sbdf/grid.hpp"

namespace testing {

inline sbdf::GridSpec grid(int nx, int ny, double h, sbdf::Boundary b) {
  return sbdf::GridSpec{nx, ny, h, sbdf::BoundarySpec::uniform(b)};
}

// Dirichlet on the left, Neumann elsewhere.
inline sbdf::GridSpec mixed_grid(int n, double h) {
  using sbdf::Boundary;
  return sbdf::GridSpec{n, n, h, {Boundary::DirichletZero, Boundary::NeumannZero, Boundary::NeumannZero, Boundary::NeumannZero}};
}

inline sbdf::Field random_field(const sbdf::GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  sbdf::Field u(g);
  for (auto& v : u.values()) v = d(rng);
  u.enforce_dirichlet();
  return u;
}

inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace testing
