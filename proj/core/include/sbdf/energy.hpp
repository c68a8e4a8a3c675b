#pragma once

#include <string>
#include <vector>

#include "sbdf/engine.hpp"
#include "sbdf/grid.hpp"
#include "sbdf/scheme.hpp"

namespace sbdf {

/// Double-well potential F(u) = (u^2 - 1)^2 / 4.
inline double double_well(double u) {
  const double s = u * u - 1.0;
  return 0.25 * s * s;
}

/// E_h[u] = alpha/2 ||grad_h u||^2 + (F(u), 1).
double discrete_energy(const Field& u, double alpha);

/// (a0 + B dt) / (2 dt) * || u - H / (beta (a0 + B dt)) ||^2, H being the
/// history term of the step.
double aux_functional(const Field& u, const Field& hist_term, const SchemeCoeffs& c, double B, double dt);

struct EnergyRecord {
  double t = 0.0;
  double E_h = 0.0;
  double H_k = 0.0;
  double augmented = 0.0;  // E_h + H_k
  double linf = 0.0;
};

EnergyRecord make_energy_record(double t, const Field& u, const Field& hist_term, const SchemeCoeffs& c,
                                double alpha, double B, double dt);

/// Relative slack for the monotonicity checks: 1e-10 (1 + |E|).
inline double energy_slack(double reference) { return 1e-10 * (1.0 + std::abs(reference)); }

struct DissipationViolation {
  std::size_t index = 0;
  double excess = 0.0;  // amount by which the inequality fails
};

struct DissipationReport {
  std::size_t checked = 0;
  std::vector<DissipationViolation> violations;
  double worst_margin = 0.0;  // max over checks of (lhs - rhs); <= slack means pass
  bool ok() const { return violations.empty(); }
};

/// Augmented energies E^0..E^M of one step's iterates together with the
/// pre-cut-off increments ||delta^{m+1}||, m = 0..M-1. Checks
/// E^{m+1} - E^m <= -(a0/(2 dt) + B/2) ||delta^{m+1}||^2 + slack for every m.
DissipationReport check_iteration_dissipation(const std::vector<double>& augmented,
                                              const std::vector<double>& delta_norms, double a0, double dt,
                                              double B);

/// Augmented energy before and after one time step, both with that step's
/// frozen history.
struct StepEnergy {
  double t = 0.0;
  double before = 0.0;
  double after = 0.0;
};

DissipationReport check_step_dissipation(const std::vector<StepEnergy>& steps);

/// Collects per-iterate energy data for one step. Attach `observer()` to
/// sbdf::step.
class IterationEnergyTracker {
 public:
  IterationEnergyTracker(const SchemeCoeffs& c, const History& hist, const NonlinearModel& model);

  IterateObserver observer();
  const std::vector<double>& augmented() const { return augmented_; }
  /// Auxiliary (pre-cut-off) increments ||tilde phi^{m+1} - phi^m||.
  const std::vector<double>& delta_norms() const { return deltas_; }
  /// Algorithmic increments ||phi^{m+1} - phi^m||; equal to delta_norms()
  /// whenever the cut-off is inactive.
  const std::vector<double>& algorithmic_norms() const { return algorithmic_; }
  const Field& hist_term() const { return H_; }
  /// Decrement inequality with the auxiliary increments.
  DissipationReport check() const;
  /// Same inequality with the algorithmic increments in place of delta.
  DissipationReport check_algorithmic() const;

 private:
  SchemeCoeffs c_;
  Field H_;
  double alpha_;
  double B_;
  double dt_;
  std::vector<double> augmented_;
  std::vector<double> deltas_;
  std::vector<double> algorithmic_;
};

}  // namespace sbdf
