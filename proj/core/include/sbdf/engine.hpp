#pragma once

#include <functional>
#include <vector>

#include "sbdf/grid.hpp"
#include "sbdf/models.hpp"
#include "sbdf/scheme.hpp"

namespace sbdf {

/// Past time levels, newest first: levels[0] = phi^n, levels[1] = phi^{n-1}, ...
struct History {
  std::vector<Field> levels;
  double t = 0.0;   // time of levels[0]
  double dt = 0.0;

  int order() const { return static_cast<int>(levels.size()); }
  /// Pushes phi^{n+1} and drops the oldest level, advancing t by dt.
  void advance(Field newest);
  void validate() const;
};

struct StepConfig {
  double tol_const = 1.0;
  int max_iters = 500;
  /// Only meaningful for k = 1; the cut-off is always applied for k >= 2.
  bool cutoff_enabled = true;

  void validate() const;
};

struct StepReport {
  int iters = 0;
  double last_increment = 0.0;
  double rho = 0.0;
  double tol = 0.0;            // C min(dt^{k+1}, h^2)
  double tol_effective = 0.0;  // tol raised to the round-off floor when needed
  double implicit_residual = 0.0;
  double linf = 0.0;
  bool cutoff = false;
  std::vector<double> increments;  // one per iteration
};

struct StepResult {
  Field value;
  StepReport report;
};

/// One fixed-point sweep as seen by an observer. `next` is the algorithmic
/// iterate (the cut-off image of `auxiliary` when the cut-off is active).
struct IterateEvent {
  int m;
  const Field& previous;
  const Field& auxiliary;
  const Field& next;
  double increment;
};
using IterateObserver = std::function<void(const IterateEvent&)>;

/// C min(dt^{k+1}, h^2).
double stopping_tolerance(int k, double dt, double h, double tol_const);

/// The iterate-independent part of the unified update,
/// sum_{l=1..k} (-beta a_l - beta (-1)^l C(k,l) B dt) phi^{n+1-l}.
Field history_term(const SchemeCoeffs& c, const History& hist, double B);

/// One Jacobi sweep of the unified fixed-point map (no cut-off).
Field fpi_update(const SchemeCoeffs& c, const History& hist, const Field& current, const NonlinearModel& model);
Field fpi_update(const SchemeCoeffs& c, const Field& hist_term, double dt, const Field& current,
                 const NonlinearModel& model);

/// Pointwise clamp to [lo, hi].
Field cutoff(const Field& u, double lo, double hi);

/// l2 norm of D u - H - (beta alpha dt / h^2) S(u) - beta dt N(u) over the
/// evolved nodes, D being the update divisor.
double implicit_residual(const SchemeCoeffs& c, const Field& hist_term, double dt, const Field& u,
                         const NonlinearModel& model);

/// Solves one sBDFk step by fixed-point iteration from phi^n. Throws
/// SolverError past cfg.max_iters and NonFiniteError on overflow.
StepResult step(const SchemeCoeffs& c, const History& hist, const NonlinearModel& model, const StepConfig& cfg,
                const IterateObserver& observer = {});

struct BootstrapReport {
  int substeps_per_step = 0;  // M: fine steps per coarse step
  int fine_steps = 0;         // (k-1) M
  int fine_iterations = 0;
};

/// Fine steps per coarse step used to build starting values:
/// max(1, ceil(dt^{1 - k/2})), so the first-order start-up error is O(dt^k).
int bootstrap_substeps(int k, double dt);

/// Builds phi^0 .. phi^{k-1} with a fine order-ramping trajectory
/// (sBDF1, sBDF2, ... up to sBDFk) of step dt / bootstrap_substeps(k, dt).
History bootstrap(const NonlinearModel& model, const Field& u0, int k, double dt, const StepConfig& cfg,
                  BootstrapReport* report = nullptr);

namespace detail {

/// out = (H + beta alpha dt / h^2 S(cur) + beta dt N) / divisor with N the
/// already evaluated modified reaction f + B cur; Dirichlet nodes get 0.
void fpi_sweep(const SchemeCoeffs& c, double alpha, double B, double dt, const Field& hist_term, const Field& cur,
               const Field& modified_reaction, Field& out);

}  // namespace detail

/// Time-marching driver for a scalar model.
class Integrator {
 public:
  Integrator(NonlinearModel model, const Field& u0, int k, double dt, StepConfig cfg);

  StepResult advance(const IterateObserver& observer = {});

  const History& history() const { return hist_; }
  const Field& current() const { return hist_.levels.front(); }
  double time() const { return hist_.t; }
  const SchemeCoeffs& coeffs() const { return coeffs_; }
  const NonlinearModel& model() const { return model_; }
  const BootstrapReport& bootstrap_report() const { return boot_; }
  /// Level n for n = 0..k-1 as produced by the bootstrap (oldest first).
  const std::vector<Field>& start_levels() const { return start_; }

 private:
  NonlinearModel model_;
  SchemeCoeffs coeffs_;
  StepConfig cfg_;
  History hist_;
  BootstrapReport boot_;
  std::vector<Field> start_;
};

}  // namespace sbdf
