#include "sbdf/scheme.hpp"

#include <stdexcept>
#include <string>

namespace sbdf {

SchemeCoeffs scheme_coeffs(int k) {
  SchemeCoeffs c;
  c.k = k;
  switch (k) {
    case 1:
      c.a = {1.0, -1.0, 0.0, 0.0, 0.0};
      c.beta = 1.0;
      c.stab = {1.0, -1.0, 0.0, 0.0, 0.0};
      break;
    case 2:
      c.a = {3.0 / 2.0, -2.0, 1.0 / 2.0, 0.0, 0.0};
      c.beta = 2.0;
      c.stab = {1.0, -2.0, 1.0, 0.0, 0.0};
      break;
    case 3:
      c.a = {11.0 / 6.0, -3.0, 3.0 / 2.0, -1.0 / 3.0, 0.0};
      c.beta = 6.0;
      c.stab = {1.0, -3.0, 3.0, -1.0, 0.0};
      break;
    case 4:
      c.a = {25.0 / 12.0, -4.0, 3.0, -4.0 / 3.0, 1.0 / 4.0};
      c.beta = 12.0;
      c.stab = {1.0, -4.0, 6.0, -4.0, 1.0};
      break;
    default:
      throw std::invalid_argument("scheme order must be 1..4, got " + std::to_string(k));
  }
  return c;
}

Field backward_difference(std::span<const Field> levels) {
  if (levels.size() < 2 || levels.size() > kMaxOrder + 1)
    throw std::invalid_argument("backward_difference needs 2..5 levels");
  const int k = static_cast<int>(levels.size()) - 1;
  const auto c = scheme_coeffs(k);
  Field out(levels[0].grid());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    require_same_grid(levels[0], levels[l]);
    const double w = c.stab[l];
    auto src = levels[l].values();
    auto dst = out.values();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += w * src[n];
  }
  return out;
}

double stabilised_diffusion_weight(const SchemeCoeffs& c, double alpha, double B, double dt, double h) {
  return 4.0 * c.beta * alpha * dt / (h * h) + 2.0 * c.beta * B * dt;
}

double update_divisor(const SchemeCoeffs& c, double alpha, double B, double dt, double h) {
  return c.beta * c.a0() + stabilised_diffusion_weight(c, alpha, B, dt, h);
}

double contraction_factor(int k, double alpha, double B, double dt, double h) {
  if (!(dt > 0.0) || !(h > 0.0) || alpha < 0.0 || B < 0.0)
    throw std::invalid_argument("contraction_factor needs dt > 0, h > 0, alpha >= 0, B >= 0");
  const auto c = scheme_coeffs(k);
  const double A = stabilised_diffusion_weight(c, alpha, B, dt, h);
  return A / (c.beta * c.a0() + A);
}

}  // namespace sbdf
