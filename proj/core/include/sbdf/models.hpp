#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbdf/grid.hpp"

namespace sbdf {

/// Semilinear reaction u_t = alpha Lap u + f(u) with the data the stabilised
/// schemes need: the stabilisation constant B >= |f'| on [lo, hi].
struct NonlinearModel {
  std::string name;
  std::function<double(double)> f;
  /// Optional analytic derivative; central differences are used when empty.
  std::function<double(double)> df;
  double B = 0.0;
  double lo = -1.0;
  double hi = 1.0;
  double alpha = 1.0;

  double reaction(double u) const { return f(u); }
  /// N(u) = f(u) + B u.
  double modified(double u) const { return f(u) + B * u; }
  double derivative(double u) const;
};

struct ModelCheck {
  double max_slope = 0.0;   // sampled max |f'| on [lo, hi]
  bool lipschitz_ok = false;
  bool sign_ok = false;     // f(hi) <= 0 <= f(lo)
  bool invariant_ok = false;  // N maps [lo, hi] into [B lo, B hi]
  std::vector<std::string> problems;
  bool ok() const { return lipschitz_ok && sign_ok && invariant_ok; }
};

/// Samples [lo, hi] at `samples` points and checks the MBP hypotheses.
ModelCheck check_model(const NonlinearModel& m, int samples = 10000);

/// Returns `m` after check_model passes; throws std::invalid_argument listing
/// the failed conditions otherwise.
NonlinearModel register_model(NonlinearModel m);

// Allen-Cahn: u_t = eps^2 Lap u + u - u^3 on [-1, 1].
double ac_reaction(double u);
NonlinearModel allen_cahn(double epsilon, double B = 2.0);

/// 0.05 (1 - cos 2 pi x) cos 2 pi y sampled at node coordinates (i h, j h).
Field ac_initial(const GridSpec& grid);

// ---------------------------------------------------------------------------
// Three-field prostate tumour system (phi, sigma, p).

/// Piecewise-linear table, held constant outside its first/last knot.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;
  double operator()(double v) const;
  void validate(const std::string& what) const;
};

/// Piecewise-constant treatment signal: `base` outside every window.
struct Schedule {
  struct Window {
    double start = 0.0;
    double end = 0.0;
    double value = 0.0;
  };
  double base = 0.0;
  std::vector<Window> windows;
  double operator()(double t) const;
};

struct ProstateParams {
  double lambda = 0.0;   // phi diffusivity
  double M = 0.0;        // phi mobility
  double m_ref = 0.0;
  double eta = 0.0;      // sigma diffusivity
  double S_h = 0.0;
  double S_c = 0.0;
  double s = 0.0;
  double gamma_h = 0.0;
  double gamma_c = 0.0;
  double D = 0.0;        // p diffusivity
  double gamma_p = 0.0;
  double alpha_h = 0.0;
  double alpha_c = 0.0;
  PiecewiseLinear m_of_sigma{{0.0, 1.0}, {0.0, 0.0}};
  Schedule u_drug{};
  /// Stabilisation constant for the phi equation; <= 0 means "estimate".
  double B_phi = 0.0;

  /// Throws std::invalid_argument on negative rates or non-finite values.
  void validate() const;
};

/// Illustrative defaults, not calibrated against any data set: chosen so the
/// healthy state (phi 0, sigma 1, p 0.0625) is an equilibrium. Units: um, day.
ProstateParams illustrative_prostate_params();

double prostate_phi_reaction(double phi, double sigma, double u, const ProstateParams& p);
double prostate_sigma_reaction(double phi, double sigma, const ProstateParams& p);
double prostate_p_reaction(double phi, double psa, const ProstateParams& p);

struct ProstateFields {
  Field phi;
  Field sigma;
  Field p;
};

/// Pointwise reaction terms (everything except diffusion) at time t.
ProstateFields prostate_reactions(const Field& phi, const Field& sigma, const Field& p, double t,
                                  const ProstateParams& params);

/// Sampled max |d f_phi / d phi| over phi in [0, 1] and sigma in
/// [sigma_lo, sigma_hi], for every treatment level the schedule takes.
double prostate_phi_lipschitz(const ProstateParams& params, double sigma_lo, double sigma_hi);

struct ProstateInitialConstants {
  double a = 150.0;  // um
  double b = 200.0;  // um
  double c_sigma0 = 1.0;
  double c_sigma1 = -0.8;
  double c_p0 = 0.0625;
  double c_p1 = 0.7975;
};

/// Grids for the three fields: phi is Dirichlet on every edge, sigma and p
/// are Neumann on every edge.
GridSpec prostate_phi_grid(int n, double h);
GridSpec prostate_neumann_grid(int n, double h);

/// Elliptical tumour seed centred in [0, L]^2 with L = (n-1) h.
ProstateFields prostate_initials(int n, double h, const ProstateInitialConstants& c = {});

}  // namespace sbdf
