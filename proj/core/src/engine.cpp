#include "sbdf/engine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sbdf/errors.hpp"
#include "sbdf/parallel.hpp"

namespace sbdf {

void History::advance(Field newest) {
  levels.insert(levels.begin(), std::move(newest));
  levels.pop_back();
  t += dt;
}

void History::validate() const {
  if (levels.empty() || levels.size() > static_cast<std::size_t>(kMaxOrder))
    throw std::invalid_argument("history must hold 1..4 levels");
  if (!(dt > 0.0)) throw std::invalid_argument("history dt must be positive");
  for (const auto& l : levels) require_same_grid(levels.front(), l);
}

void StepConfig::validate() const {
  if (!(tol_const > 0.0)) throw std::invalid_argument("tol_const must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

double stopping_tolerance(int k, double dt, double h, double tol_const) {
  return tol_const * std::min(std::pow(dt, k + 1), h * h);
}

Field history_term(const SchemeCoeffs& c, const History& hist, double B) {
  if (hist.order() != c.k)
    throw std::invalid_argument("history holds " + std::to_string(hist.order()) + " levels, scheme needs " +
                                std::to_string(c.k));
  hist.validate();
  Field out(hist.levels.front().grid());
  auto dst = out.values();
  for (int l = 1; l <= c.k; ++l) {
    const double w = -c.beta * c.a[l] - c.beta * c.stab[l] * B * hist.dt;
    auto src = hist.levels[static_cast<std::size_t>(l - 1)].values();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += w * src[n];
  }
  return out;
}

namespace {

struct Weights {
  double nb;       // beta alpha dt / h^2
  double react;    // beta dt
  double divisor;  // beta a0 + A_k
};

Weights weights(const SchemeCoeffs& c, double alpha, double B, double dt, double h) {
  return {c.beta * alpha * dt / (h * h), c.beta * dt, update_divisor(c, alpha, B, dt, h)};
}

// out = (H + nb S(cur) + react N(cur)) / divisor; Dirichlet nodes 0.
void fpi_into(const Weights& w, const Field& H, const Field& cur, const NonlinearModel& model, Field& out) {
  const auto& g = cur.grid();
  detail::neighbor_sum_into(g, cur.values(), out.values());
  const double inv = 1.0 / w.divisor;
  for_rows(g.ny, [&](int b, int e) {
    for (int j = b; j < e; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t n = g.index(i, j);
        if (g.is_dirichlet(i, j)) {
          out[n] = 0.0;
          continue;
        }
        const double v = (H[n] + w.nb * out[n] + w.react * model.modified(cur[n])) * inv;
        out[n] = v;
      }
    }
  });
  require_finite(out, "fixed-point update");
}

void clamp_into(const Field& u, double lo, double hi, Field& out) {
  auto src = u.values();
  auto dst = out.values();
  for (std::size_t n = 0; n < dst.size(); ++n) dst[n] = std::clamp(src[n], lo, hi);
}

}  // namespace

void detail::fpi_sweep(const SchemeCoeffs& c, double alpha, double B, double dt, const Field& hist_term,
                       const Field& cur, const Field& modified_reaction, Field& out) {
  const auto& g = cur.grid();
  const auto w = weights(c, alpha, B, dt, g.h);
  detail::neighbor_sum_into(g, cur.values(), out.values());
  const double inv = 1.0 / w.divisor;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      out[n] = g.is_dirichlet(i, j) ? 0.0 : (hist_term[n] + w.nb * out[n] + w.react * modified_reaction[n]) * inv;
    }
  }
  require_finite(out, "fixed-point update");
}

Field fpi_update(const SchemeCoeffs& c, const Field& hist_term, double dt, const Field& current,
                 const NonlinearModel& model) {
  require_same_grid(hist_term, current);
  require_finite(current, "fpi_update input");
  const auto w = weights(c, model.alpha, model.B, dt, current.grid().h);
  Field out(current.grid());
  fpi_into(w, hist_term, current, model, out);
  return out;
}

Field fpi_update(const SchemeCoeffs& c, const History& hist, const Field& current, const NonlinearModel& model) {
  return fpi_update(c, history_term(c, hist, model.B), hist.dt, current, model);
}

Field cutoff(const Field& u, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("cutoff needs lo <= hi");
  Field out(u.grid());
  clamp_into(u, lo, hi, out);
  return out;
}

double implicit_residual(const SchemeCoeffs& c, const Field& hist_term, double dt, const Field& u,
                         const NonlinearModel& model) {
  require_same_grid(hist_term, u);
  const auto& g = u.grid();
  const auto w = weights(c, model.alpha, model.B, dt, g.h);
  Field r(g);
  detail::neighbor_sum_into(g, u.values(), r.values());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      r[n] = g.is_dirichlet(i, j)
                 ? 0.0
                 : w.divisor * u[n] - hist_term[n] - w.nb * r[n] - w.react * model.modified(u[n]);
    }
  }
  return l2_norm(r);
}

StepResult step(const SchemeCoeffs& c, const History& hist, const NonlinearModel& model, const StepConfig& cfg,
                const IterateObserver& observer) {
  cfg.validate();
  const Field H = history_term(c, hist, model.B);
  const Field& start = hist.levels.front();
  const auto& g = start.grid();
  const auto w = weights(c, model.alpha, model.B, hist.dt, g.h);
  const bool clamp = c.k >= 2 || cfg.cutoff_enabled;

  StepReport rep;
  rep.rho = contraction_factor(c.k, model.alpha, model.B, hist.dt, g.h);
  rep.tol = stopping_tolerance(c.k, hist.dt, g.h, cfg.tol_const);
  rep.cutoff = clamp;

  Field prev = start;
  Field aux(g);
  Field next(g);
  for (int m = 0; m < cfg.max_iters; ++m) {
    fpi_into(w, H, prev, model, aux);
    if (clamp) clamp_into(aux, model.lo, model.hi, next);
    else next = aux;
    const double inc = l2_distance(next, prev);
    if (m == 0) {
      // The increment norm cannot resolve changes below a few ulps of the
      // solution itself.
      const double floor = 32.0 * DBL_EPSILON * std::max(l2_norm(start), l2_norm(next));
      rep.tol_effective = std::max(rep.tol, floor);
    }
    rep.increments.push_back(inc);
    if (observer) observer(IterateEvent{m, prev, aux, next, inc});
    std::swap(prev, next);
    rep.iters = m + 1;
    rep.last_increment = inc;
    if (inc < rep.tol_effective) {
      rep.linf = linf_norm(prev);
      rep.implicit_residual = implicit_residual(c, H, hist.dt, prev, model);
      return {std::move(prev), std::move(rep)};
    }
  }
  std::ostringstream os;
  os << "fixed-point iteration did not converge in " << cfg.max_iters << " sweeps (last increment "
     << rep.last_increment << ", tolerance " << rep.tol_effective << ", rho " << rep.rho << ")";
  throw SolverError(os.str(), rep.last_increment, rep.rho);
}

int bootstrap_substeps(int k, double dt) {
  if (k <= 1) return 1;
  const double m = std::ceil(std::pow(dt, 1.0 - 0.5 * k) - 1e-9);
  return std::max(1, static_cast<int>(std::min(m, 1e8)));
}

History bootstrap(const NonlinearModel& model, const Field& u0, int k, double dt, const StepConfig& cfg,
                  BootstrapReport* report) {
  (void)scheme_coeffs(k);
  if (!(dt > 0.0)) throw std::invalid_argument("bootstrap needs dt > 0");
  require_finite(u0, "initial data");
  Field start = u0;
  start.enforce_dirichlet();

  BootstrapReport rep;
  rep.substeps_per_step = bootstrap_substeps(k, dt);
  std::vector<Field> coarse{start};  // oldest first
  if (k > 1) {
    const int M = rep.substeps_per_step;
    const double fine_dt = dt / M;
    History fine{{start}, 0.0, fine_dt};  // newest first, grows up to k levels
    const int total = (k - 1) * M;
    for (int s = 1; s <= total; ++s) {
      const int order = std::min(s, k);
      const auto c = scheme_coeffs(order);
      History view{{fine.levels.begin(), fine.levels.begin() + order}, fine.t, fine_dt};
      auto res = step(c, view, model, cfg);
      rep.fine_iterations += res.report.iters;
      fine.levels.insert(fine.levels.begin(), res.value);
      if (fine.order() > k) fine.levels.pop_back();
      fine.t = s * fine_dt;
      if (s % M == 0) coarse.push_back(std::move(res.value));
    }
    rep.fine_steps = total;
  }
  if (report) *report = rep;
  History h;
  h.dt = dt;
  h.t = (k - 1) * dt;
  h.levels.assign(coarse.rbegin(), coarse.rend());
  return h;
}

Integrator::Integrator(NonlinearModel model, const Field& u0, int k, double dt, StepConfig cfg)
    : model_(std::move(model)), coeffs_(scheme_coeffs(k)), cfg_(cfg) {
  cfg_.validate();
  hist_ = bootstrap(model_, u0, k, dt, cfg_, &boot_);
  start_.assign(hist_.levels.rbegin(), hist_.levels.rend());
}

StepResult Integrator::advance(const IterateObserver& observer) {
  auto res = step(coeffs_, hist_, model_, cfg_, observer);
  hist_.advance(res.value);
  return res;
}

}  // namespace sbdf
