#pragma once

#include <array>
#include <vector>

#include "sbdf/engine.hpp"
#include "sbdf/models.hpp"

namespace sbdf {

struct CoupledStepReport {
  int iters = 0;
  std::array<double, 3> last_increment{};
  double phi_min = 0.0;
  double phi_max = 0.0;
  bool finite = true;
};

/// sBDFk for the (phi, sigma, p) system. All three fields take one Jacobi
/// sweep per iteration with the reactions evaluated at the current triple;
/// only phi is cut off, to [0, 1].
class ProstateIntegrator {
 public:
  ProstateIntegrator(ProstateParams params, ProstateFields init, int k, double dt, StepConfig cfg);

  CoupledStepReport advance();

  const ProstateFields& current() const { return levels_.front(); }
  double time() const { return t_; }
  double dt() const { return dt_; }
  int order() const { return coeffs_.k; }

  double B_phi() const { return B_[0]; }
  double B_sigma() const { return B_[1]; }
  double B_p() const { return B_[2]; }
  /// Set once the sampled phi-reaction slope over the observed sigma range
  /// has exceeded B_phi.
  bool lipschitz_warning() const { return warned_; }
  const BootstrapReport& bootstrap_report() const { return boot_; }
  /// Starting levels phi^0..phi^{k-1} (oldest first), for trace output.
  const std::vector<ProstateFields>& start_levels() const { return start_; }

 private:
  CoupledStepReport solve(const SchemeCoeffs& c, const std::vector<ProstateFields>& hist, double dt,
                          double t_new, ProstateFields& out);
  void check_lipschitz(const Field& sigma);

  ProstateParams params_;
  SchemeCoeffs coeffs_;
  StepConfig cfg_;
  double dt_;
  double t_ = 0.0;
  std::array<double, 3> alpha_{};
  std::array<double, 3> B_{};
  std::vector<ProstateFields> levels_;  // newest first
  std::vector<ProstateFields> start_;
  BootstrapReport boot_;
  bool warned_ = false;
};

}  // namespace sbdf
