#include "sbdf/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sbdf {

double NonlinearModel::derivative(double u) const {
  if (df) return df(u);
  const double step = 1e-6 * std::max(1.0, std::abs(u));
  return (f(u + step) - f(u - step)) / (2.0 * step);
}

ModelCheck check_model(const NonlinearModel& m, int samples) {
  ModelCheck r;
  if (!m.f) {
    r.problems.push_back("reaction f is not set");
    return r;
  }
  if (!(m.hi > m.lo)) {
    r.problems.push_back("bound interval must satisfy lo < hi");
    return r;
  }
  samples = std::max(samples, 2);
  const double du = (m.hi - m.lo) / (samples - 1);
  double prev = m.f(m.lo);
  bool maps_into = true;
  for (int n = 0; n < samples; ++n) {
    const double u = (n == samples - 1) ? m.hi : m.lo + du * n;
    const double fu = m.f(u);
    if (n > 0) r.max_slope = std::max(r.max_slope, std::abs(fu - prev) / du);
    if (m.df) r.max_slope = std::max(r.max_slope, std::abs(m.df(u)));
    prev = fu;
    const double N = fu + m.B * u;
    const double slack = 1e-12 * (1.0 + std::abs(m.B) * std::max(std::abs(m.lo), std::abs(m.hi)));
    if (N < m.B * m.lo - slack || N > m.B * m.hi + slack) maps_into = false;
  }
  r.lipschitz_ok = r.max_slope <= m.B * (1.0 + 1e-6);
  r.sign_ok = m.f(m.hi) <= 0.0 && m.f(m.lo) >= 0.0;
  r.invariant_ok = maps_into && m.lo <= 0.0 && m.hi >= 0.0;
  if (!r.lipschitz_ok) {
    std::ostringstream os;
    os << "sampled |f'| reaches " << r.max_slope << " > B = " << m.B;
    r.problems.push_back(os.str());
  }
  if (!r.sign_ok) r.problems.push_back("sign condition f(hi) <= 0 <= f(lo) fails");
  if (!r.invariant_ok)
    r.problems.push_back("N(u) = f(u) + B u does not map [lo, hi] into [B lo, B hi] (or 0 outside [lo, hi])");
  return r;
}

NonlinearModel register_model(NonlinearModel m) {
  if (!(m.alpha >= 0.0) || !(m.B > 0.0)) throw std::invalid_argument(m.name + ": need alpha >= 0 and B > 0");
  const auto r = check_model(m);
  if (!r.ok()) {
    std::string msg = m.name + " failed registration:";
    for (const auto& p : r.problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
  }
  return m;
}

double ac_reaction(double u) { return u - u * u * u; }

NonlinearModel allen_cahn(double epsilon, double B) {
  NonlinearModel m;
  m.name = "allen_cahn";
  m.f = ac_reaction;
  m.df = [](double u) { return 1.0 - 3.0 * u * u; };
  m.B = B;
  m.lo = -1.0;
  m.hi = 1.0;
  m.alpha = epsilon * epsilon;
  return register_model(std::move(m));
}

Field ac_initial(const GridSpec& grid) {
  Field u(grid);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int j = 0; j < grid.ny; ++j) {
    const double y = j * grid.h;
    for (int i = 0; i < grid.nx; ++i) {
      const double x = i * grid.h;
      u(i, j) = 0.05 * (1.0 - std::cos(two_pi * x)) * std::cos(two_pi * y);
    }
  }
  u.enforce_dirichlet();
  return u;
}

double PiecewiseLinear::operator()(double v) const {
  if (x.empty()) return 0.0;
  if (v <= x.front()) return y.front();
  if (v >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  const std::size_t hi = static_cast<std::size_t>(it - x.begin());
  const std::size_t lo = hi - 1;
  const double w = (v - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - w) * y[lo] + w * y[hi];
}

void PiecewiseLinear::validate(const std::string& what) const {
  if (x.empty() || x.size() != y.size()) throw std::invalid_argument(what + ": table needs matching, non-empty x and y");
  for (std::size_t n = 1; n < x.size(); ++n)
    if (!(x[n] > x[n - 1])) throw std::invalid_argument(what + ": knots must be strictly increasing");
  for (std::size_t n = 0; n < x.size(); ++n)
    if (!std::isfinite(x[n]) || !std::isfinite(y[n])) throw std::invalid_argument(what + ": non-finite entry");
}

double Schedule::operator()(double t) const {
  for (const auto& w : windows)
    if (t >= w.start && t < w.end) return w.value;
  return base;
}

void ProstateParams::validate() const {
  const double rates[] = {lambda, M, m_ref, eta, S_h, S_c, s, gamma_h, gamma_c, D, gamma_p, alpha_h, alpha_c};
  for (double r : rates) {
    if (!std::isfinite(r)) throw std::invalid_argument("prostate parameters must be finite");
    if (r < 0.0) throw std::invalid_argument("prostate rate parameters must be >= 0");
  }
  if (!std::isfinite(B_phi)) throw std::invalid_argument("prostate B_phi must be finite");
  m_of_sigma.validate("prostate m_of_sigma");
  if (!std::isfinite(u_drug.base)) throw std::invalid_argument("prostate u_drug base must be finite");
  for (const auto& w : u_drug.windows)
    if (!(w.end > w.start) || !std::isfinite(w.value))
      throw std::invalid_argument("prostate u_drug windows need start < end and a finite value");
}

ProstateParams illustrative_prostate_params() {
  ProstateParams p;
  p.lambda = 640.0;
  p.M = 2.5;
  p.m_ref = 0.05;
  p.eta = 6400.0;
  p.S_h = 2.75;
  p.S_c = 2.75;
  p.s = 0.0;
  p.gamma_h = 2.75;
  p.gamma_c = 17.0;
  p.D = 6400.0;
  p.gamma_p = 0.27;
  p.alpha_h = 0.0625 * 0.27;
  p.alpha_c = 0.86 * 0.27;
  p.m_of_sigma = {{0.0, 0.5, 1.0}, {-0.05, 0.2, 0.4}};
  p.u_drug = {};
  p.B_phi = 0.0;
  return p;
}

double prostate_phi_reaction(double phi, double sigma, double u, const ProstateParams& p) {
  const double mu = p.m_of_sigma(sigma) - p.m_ref * u;
  return -2.0 * p.M * phi * (1.0 - phi) * (1.0 - 2.0 * phi - 3.0 * mu);
}

double prostate_sigma_reaction(double phi, double sigma, const ProstateParams& p) {
  return p.S_h * (1.0 - phi) + (p.S_c - p.s) * phi - (p.gamma_h * (1.0 - phi) + p.gamma_c * phi) * sigma;
}

double prostate_p_reaction(double phi, double psa, const ProstateParams& p) {
  return -p.gamma_p * psa + p.alpha_h * (1.0 - phi) + p.alpha_c * phi;
}

ProstateFields prostate_reactions(const Field& phi, const Field& sigma, const Field& p, double t,
                                  const ProstateParams& params) {
  if (phi.size() != sigma.size() || phi.size() != p.size())
    throw std::invalid_argument("prostate fields must share a node layout");
  const double u = params.u_drug(t);
  ProstateFields out{Field(phi.grid()), Field(sigma.grid()), Field(p.grid())};
  for (std::size_t n = 0; n < phi.size(); ++n) {
    out.phi[n] = prostate_phi_reaction(phi[n], sigma[n], u, params);
    out.sigma[n] = prostate_sigma_reaction(phi[n], sigma[n], params);
    out.p[n] = prostate_p_reaction(phi[n], p[n], params);
  }
  return out;
}

double prostate_phi_lipschitz(const ProstateParams& params, double sigma_lo, double sigma_hi) {
  std::vector<double> levels{params.u_drug.base};
  for (const auto& w : params.u_drug.windows) levels.push_back(w.value);
  double best = 0.0;
  constexpr int kPhi = 401, kSigma = 41;
  for (double u : levels) {
    for (int b = 0; b < kSigma; ++b) {
      const double sigma = sigma_lo + (sigma_hi - sigma_lo) * b / (kSigma - 1);
      const double mu = params.m_of_sigma(sigma) - params.m_ref * u;
      for (int a = 0; a < kPhi; ++a) {
        const double phi = static_cast<double>(a) / (kPhi - 1);
        const double slope =
            -2.0 * params.M * ((1.0 - 2.0 * phi) * (1.0 - 2.0 * phi - 3.0 * mu) - 2.0 * phi * (1.0 - phi));
        best = std::max(best, std::abs(slope));
      }
    }
  }
  return best;
}

GridSpec prostate_phi_grid(int n, double h) {
  return GridSpec{n, n, h, BoundarySpec::uniform(Boundary::DirichletZero)};
}

GridSpec prostate_neumann_grid(int n, double h) {
  return GridSpec{n, n, h, BoundarySpec::uniform(Boundary::NeumannZero)};
}

ProstateFields prostate_initials(int n, double h, const ProstateInitialConstants& c) {
  const GridSpec gphi = prostate_phi_grid(n, h);
  const GridSpec gn = prostate_neumann_grid(n, h);
  const double centre = 0.5 * (n - 1) * h;
  ProstateFields out{Field(gphi), Field(gn), Field(gn)};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double dx = (i * h - centre) / c.a;
      const double dy = (j * h - centre) / c.b;
      const double z = 10.0 * std::sqrt(dx * dx + dy * dy) - 1.0;
      // 0.5 - 0.5 tanh(z) written so the far field stays positive.
      const double phi0 = 1.0 / (1.0 + std::exp(2.0 * z));
      out.phi(i, j) = phi0;
      out.sigma(i, j) = c.c_sigma0 + c.c_sigma1 * phi0;
      out.p(i, j) = c.c_p0 + c.c_p1 * phi0;
    }
  }
  out.phi.enforce_dirichlet();
  return out;
}

}  // namespace sbdf
