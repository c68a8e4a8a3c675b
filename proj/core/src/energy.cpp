#include "sbdf/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace sbdf {

double discrete_energy(const Field& u, double alpha) {
  const auto& g = u.grid();
  double potential = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) row += double_well(u(i, j));
    potential += row;
  }
  return 0.5 * alpha * grad_norm_sq(u) + g.h * g.h * potential;
}

double aux_functional(const Field& u, const Field& hist_term, const SchemeCoeffs& c, double B, double dt) {
  require_same_grid(u, hist_term);
  const double scale = (c.a0() + B * dt) / (2.0 * dt);
  const double centre = 1.0 / (c.beta * c.a0() + c.beta * B * dt);
  const auto& g = u.grid();
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double d = u(i, j) - centre * hist_term(i, j);
      row += d * d;
    }
    s += row;
  }
  return scale * g.h * g.h * s;
}

EnergyRecord make_energy_record(double t, const Field& u, const Field& hist_term, const SchemeCoeffs& c,
                                double alpha, double B, double dt) {
  EnergyRecord r;
  r.t = t;
  r.E_h = discrete_energy(u, alpha);
  r.H_k = aux_functional(u, hist_term, c, B, dt);
  r.augmented = r.E_h + r.H_k;
  r.linf = linf_norm(u);
  return r;
}

DissipationReport check_iteration_dissipation(const std::vector<double>& augmented,
                                              const std::vector<double>& delta_norms, double a0, double dt,
                                              double B) {
  if (!augmented.empty() && delta_norms.size() != augmented.size() - 1)
    throw std::invalid_argument("check_iteration_dissipation: need one increment per consecutive energy pair");
  DissipationReport rep;
  const double coef = a0 / (2.0 * dt) + 0.5 * B;
  const std::size_t n = augmented.empty() ? 0 : augmented.size() - 1;
  rep.worst_margin = -INFINITY;
  for (std::size_t m = 0; m < n; ++m) {
    const double lhs = augmented[m + 1] - augmented[m];
    const double rhs = -coef * delta_norms[m] * delta_norms[m];
    const double margin = lhs - rhs;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    ++rep.checked;
    if (margin > energy_slack(augmented[m])) rep.violations.push_back({m, margin});
  }
  if (rep.checked == 0) rep.worst_margin = 0.0;
  return rep;
}

DissipationReport check_step_dissipation(const std::vector<StepEnergy>& steps) {
  DissipationReport rep;
  rep.worst_margin = steps.empty() ? 0.0 : -INFINITY;
  for (std::size_t n = 0; n < steps.size(); ++n) {
    const double margin = steps[n].after - steps[n].before;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    ++rep.checked;
    if (margin > energy_slack(steps[n].before)) rep.violations.push_back({n, margin});
  }
  return rep;
}

IterationEnergyTracker::IterationEnergyTracker(const SchemeCoeffs& c, const History& hist,
                                               const NonlinearModel& model)
    : c_(c), H_(history_term(c, hist, model.B)), alpha_(model.alpha), B_(model.B), dt_(hist.dt) {}

IterateObserver IterationEnergyTracker::observer() {
  return [this](const IterateEvent& ev) {
    if (augmented_.empty())
      augmented_.push_back(discrete_energy(ev.previous, alpha_) + aux_functional(ev.previous, H_, c_, B_, dt_));
    deltas_.push_back(l2_distance(ev.auxiliary, ev.previous));
    algorithmic_.push_back(l2_distance(ev.next, ev.previous));
    augmented_.push_back(discrete_energy(ev.next, alpha_) + aux_functional(ev.next, H_, c_, B_, dt_));
  };
}

DissipationReport IterationEnergyTracker::check() const {
  return check_iteration_dissipation(augmented_, deltas_, c_.a0(), dt_, B_);
}

DissipationReport IterationEnergyTracker::check_algorithmic() const {
  return check_iteration_dissipation(augmented_, algorithmic_, c_.a0(), dt_, B_);
}

}  // namespace sbdf
