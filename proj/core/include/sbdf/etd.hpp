#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sbdf/engine.hpp"
#include "sbdf/grid.hpp"
#include "sbdf/models.hpp"
#include "sbdf/scheme.hpp"

// Dense small-grid oracles: matrix form of the linear operator, exponential
// integrators built on its eigendecomposition, and a Newton solver for the
// implicit sBDFk systems. Everything here is O(n^2) memory and O(n^3) setup.

namespace sbdf::etd {

inline constexpr std::size_t kMaxUnknowns = 4096;

/// alpha Lap_h - B I restricted to the evolved (non-Dirichlet) nodes.
struct DenseOperator {
  GridSpec grid{};
  double alpha = 0.0;
  double B = 0.0;
  Eigen::MatrixXd L;
  std::vector<std::size_t> node_of;  // unknown -> node index
  std::vector<long> unknown_of;      // node -> unknown, -1 for Dirichlet nodes

  std::size_t unknowns() const { return node_of.size(); }
  Eigen::VectorXd to_vector(const Field& u) const;
  Field to_field(const Eigen::VectorXd& v) const;

  /// Operator with no grid attached (scalar and hand-built tests).
  static DenseOperator from_matrix(Eigen::MatrixXd L);
};

/// Throws std::length_error past kMaxUnknowns evolved nodes.
DenseOperator assemble_operator(const GridSpec& grid, double alpha, double B);

/// phi_0(z) = e^z, phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2,
/// with series near z = 0.
double phi0(double z);
double phi1(double z);
double phi2(double z);

/// Symmetric eigendecomposition L = V diag(lambda) V^T, reused across steps.
class ExponentialPropagator {
 public:
  explicit ExponentialPropagator(const DenseOperator& op);

  /// V diag(g(dt * lambda)) V^T v for g in {phi0, phi1, phi2}.
  Eigen::VectorXd apply(int which, double dt, const Eigen::VectorXd& v) const;
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const DenseOperator& op() const { return op_; }

 private:
  DenseOperator op_;
  Eigen::MatrixXd V_;
  Eigen::VectorXd lambda_;
};

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// u^{n+1} = e^{dt L} u + dt phi_1(dt L) N(u).
Eigen::VectorXd etd1_step(const Eigen::VectorXd& u, double dt, const ExponentialPropagator& L, const VectorMap& N);
/// ETD1 predictor plus dt phi_2(dt L) (N(pred) - N(u)).
Eigen::VectorXd etdrk2_step(const Eigen::VectorXd& u, double dt, const ExponentialPropagator& L,
                            const VectorMap& N);

/// N(u) = f(u) + B u applied entrywise.
VectorMap modified_nonlinearity(const NonlinearModel& model);

Field etd1_step(const Field& u, double dt, const ExponentialPropagator& L, const NonlinearModel& model);
Field etdrk2_step(const Field& u, double dt, const ExponentialPropagator& L, const NonlinearModel& model);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Solves the implicit sBDFk system (no cut-off) by dense Newton from phi^n.
/// Residual target: l2 <= 1e-12 (1 + ||H||). Throws SolverError after 50
/// iterations.
Field newton_solve_implicit(const SchemeCoeffs& c, const History& hist, const NonlinearModel& model,
                            NewtonReport* report = nullptr);

}  // namespace sbdf::etd
