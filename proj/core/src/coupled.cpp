#include "sbdf/coupled.hpp"

#include <algorithm>
#include <cfloat>
#include <iostream>
#include <sstream>

#include "sbdf/errors.hpp"

namespace sbdf {

namespace {

Field& component(ProstateFields& f, int c) { return c == 0 ? f.phi : c == 1 ? f.sigma : f.p; }
const Field& component(const ProstateFields& f, int c) { return c == 0 ? f.phi : c == 1 ? f.sigma : f.p; }

std::pair<double, double> range_of(const Field& u) {
  const auto v = u.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

}  // namespace

ProstateIntegrator::ProstateIntegrator(ProstateParams params, ProstateFields init, int k, double dt,
                                       StepConfig cfg)
    : params_(std::move(params)), coeffs_(scheme_coeffs(k)), cfg_(cfg), dt_(dt) {
  params_.validate();
  cfg_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("prostate dt must be positive");
  init.phi.enforce_dirichlet();
  for (int c = 0; c < 3; ++c) require_finite(component(init, c), "prostate initial data");

  alpha_ = {params_.lambda, params_.eta, params_.D};
  const auto [slo, shi] = range_of(init.sigma);
  const double pad = 0.25 * std::max(shi - slo, 0.1);
  if (params_.B_phi > 0.0) {
    B_[0] = params_.B_phi;
  } else {
    B_[0] = 1.05 * prostate_phi_lipschitz(params_, std::max(0.0, slo - pad), shi + pad);
    if (!(B_[0] > 0.0)) B_[0] = 1e-12;
  }
  B_[1] = std::max(params_.gamma_h, params_.gamma_c);
  B_[2] = params_.gamma_p;
  check_lipschitz(init.sigma);

  // Order-ramping fine trajectory for the starting levels.
  std::vector<ProstateFields> coarse{init};
  boot_.substeps_per_step = bootstrap_substeps(k, dt);
  if (k > 1) {
    const int M = boot_.substeps_per_step;
    const double fine_dt = dt / M;
    std::vector<ProstateFields> fine{init};
    const int total = (k - 1) * M;
    for (int s = 1; s <= total; ++s) {
      const int order = std::min(s, k);
      std::vector<ProstateFields> view(fine.begin(), fine.begin() + order);
      ProstateFields next = init;
      const auto rep = solve(scheme_coeffs(order), view, fine_dt, s * fine_dt, next);
      boot_.fine_iterations += rep.iters;
      fine.insert(fine.begin(), next);
      if (static_cast<int>(fine.size()) > k) fine.pop_back();
      if (s % M == 0) coarse.push_back(std::move(next));
    }
    boot_.fine_steps = total;
  }
  start_ = coarse;
  levels_.assign(coarse.rbegin(), coarse.rend());
  t_ = (k - 1) * dt;
}

void ProstateIntegrator::check_lipschitz(const Field& sigma) {
  if (warned_ || params_.B_phi <= 0.0) return;
  const auto [lo, hi] = range_of(sigma);
  const double L = prostate_phi_lipschitz(params_, lo, hi);
  if (L > B_[0]) {
    warned_ = true;
    std::cerr << "warning: phi-reaction slope " << L << " over sigma in [" << lo << ", " << hi
              << "] exceeds B_phi = " << B_[0] << "\n";
  }
}

CoupledStepReport ProstateIntegrator::solve(const SchemeCoeffs& c, const std::vector<ProstateFields>& hist,
                                            double dt, double t_new, ProstateFields& out) {
  std::array<Field, 3> H;
  std::array<double, 3> tol{};
  for (int q = 0; q < 3; ++q) {
    History h;
    h.dt = dt;
    for (const auto& level : hist) h.levels.push_back(component(level, q));
    H[q] = history_term(c, h, B_[q]);
  }
  ProstateFields cur = hist.front();
  ProstateFields next = cur;
  Field modified(cur.phi.grid());
  CoupledStepReport rep;
  for (int m = 0; m < cfg_.max_iters; ++m) {
    const auto f = prostate_reactions(cur.phi, cur.sigma, cur.p, t_new, params_);
    bool done = true;
    for (int q = 0; q < 3; ++q) {
      const Field& u = component(cur, q);
      const Field& fq = component(f, q);
      Field& dst = component(next, q);
      modified = Field(u.grid());
      for (std::size_t n = 0; n < u.size(); ++n) modified[n] = fq[n] + B_[q] * u[n];
      detail::fpi_sweep(c, alpha_[q], B_[q], dt, H[q], u, modified, dst);
      if (q == 0 && (c.k >= 2 || cfg_.cutoff_enabled))
        for (double& v : dst.values()) v = std::clamp(v, 0.0, 1.0);
      const double inc = l2_distance(dst, u);
      if (m == 0) {
        const double base = stopping_tolerance(c.k, dt, u.grid().h, cfg_.tol_const);
        tol[q] = std::max(base, 32.0 * DBL_EPSILON * std::max(l2_norm(u), l2_norm(dst)));
      }
      rep.last_increment[q] = inc;
      if (!(inc < tol[q])) done = false;
    }
    std::swap(cur, next);
    rep.iters = m + 1;
    if (done) {
      const auto [lo, hi] = range_of(cur.phi);
      rep.phi_min = lo;
      rep.phi_max = hi;
      rep.finite = cur.phi.all_finite() && cur.sigma.all_finite() && cur.p.all_finite();
      out = std::move(cur);
      return rep;
    }
  }
  std::ostringstream os;
  os << "coupled fixed-point iteration did not converge in " << cfg_.max_iters << " sweeps";
  throw SolverError(os.str(), *std::max_element(rep.last_increment.begin(), rep.last_increment.end()), 0.0);
}

CoupledStepReport ProstateIntegrator::advance() {
  ProstateFields next = levels_.front();
  const auto rep = solve(coeffs_, levels_, dt_, t_ + dt_, next);
  check_lipschitz(next.sigma);
  levels_.insert(levels_.begin(), std::move(next));
  levels_.pop_back();
  t_ += dt_;
  return rep;
}

}  // namespace sbdf
