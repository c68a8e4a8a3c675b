#include "sbdf/etd.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sbdf/errors.hpp"

namespace sbdf::etd {

Eigen::VectorXd DenseOperator::to_vector(const Field& u) const {
  if (!(u.grid() == grid)) throw std::invalid_argument("field grid does not match the dense operator");
  Eigen::VectorXd v(static_cast<Eigen::Index>(unknowns()));
  for (std::size_t k = 0; k < unknowns(); ++k) v[static_cast<Eigen::Index>(k)] = u[node_of[k]];
  return v;
}

Field DenseOperator::to_field(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != unknowns()) throw std::invalid_argument("vector size mismatch");
  Field u(grid);
  for (std::size_t k = 0; k < unknowns(); ++k) u[node_of[k]] = v[static_cast<Eigen::Index>(k)];
  return u;
}

DenseOperator DenseOperator::from_matrix(Eigen::MatrixXd L) {
  if (L.rows() != L.cols()) throw std::invalid_argument("operator must be square");
  DenseOperator op;
  op.L = std::move(L);
  op.node_of.resize(static_cast<std::size_t>(op.L.rows()));
  op.unknown_of.resize(op.node_of.size());
  for (std::size_t k = 0; k < op.node_of.size(); ++k) {
    op.node_of[k] = k;
    op.unknown_of[k] = static_cast<long>(k);
  }
  return op;
}

DenseOperator assemble_operator(const GridSpec& g, double alpha, double B) {
  g.validate();
  DenseOperator op;
  op.grid = g;
  op.alpha = alpha;
  op.B = B;
  op.unknown_of.assign(g.size(), -1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!g.is_dirichlet(i, j)) {
        op.unknown_of[g.index(i, j)] = static_cast<long>(op.node_of.size());
        op.node_of.push_back(g.index(i, j));
      }
  const std::size_t n = op.node_of.size();
  if (n > kMaxUnknowns)
    throw std::length_error("dense oracle limited to " + std::to_string(kMaxUnknowns) + " unknowns, grid has " +
                            std::to_string(n));
  const auto N = static_cast<Eigen::Index>(n);
  op.L = Eigen::MatrixXd::Zero(N, N);
  const double w = alpha / (g.h * g.h);

  // Returns the neighbour node in direction (di, dj), the node itself for a
  // Neumann ghost, or -1 when the neighbour is a Dirichlet node.
  auto neighbour = [&](int i, int j, int di, int dj) -> long {
    int a = i + di, b = j + dj;
    if (a < 0) a = g.bc.left == Boundary::Periodic ? g.nx - 1 : i;
    if (a >= g.nx) a = g.bc.right == Boundary::Periodic ? 0 : i;
    if (b < 0) b = g.bc.bottom == Boundary::Periodic ? g.ny - 1 : j;
    if (b >= g.ny) b = g.bc.top == Boundary::Periodic ? 0 : j;
    return op.unknown_of[g.index(a, b)];
  };

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const long row = op.unknown_of[g.index(i, j)];
      if (row < 0) continue;
      op.L(row, row) += -4.0 * w - B;
      const int dirs[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      for (const auto& d : dirs) {
        const long col = neighbour(i, j, d[0], d[1]);
        if (col >= 0) op.L(row, col) += w;
      }
    }
  }
  return op;
}

double phi0(double z) { return std::exp(z); }

double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-2) return 0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (1.0 / 120.0 + z / 720.0)));
  return (std::expm1(z) - z) / (z * z);
}

ExponentialPropagator::ExponentialPropagator(const DenseOperator& op) : op_(op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.L);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  V_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
}

Eigen::VectorXd ExponentialPropagator::apply(int which, double dt, const Eigen::VectorXd& v) const {
  Eigen::VectorXd c = V_.transpose() * v;
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const double z = dt * lambda_[n];
    const double g = which == 0 ? phi0(z) : which == 1 ? phi1(z) : phi2(z);
    c[n] *= g;
  }
  return V_ * c;
}

Eigen::VectorXd etd1_step(const Eigen::VectorXd& u, double dt, const ExponentialPropagator& L, const VectorMap& N) {
  return L.apply(0, dt, u) + dt * L.apply(1, dt, N(u));
}

Eigen::VectorXd etdrk2_step(const Eigen::VectorXd& u, double dt, const ExponentialPropagator& L,
                            const VectorMap& N) {
  const Eigen::VectorXd Nu = N(u);
  const Eigen::VectorXd pred = L.apply(0, dt, u) + dt * L.apply(1, dt, Nu);
  return pred + dt * L.apply(2, dt, N(pred) - Nu);
}

VectorMap modified_nonlinearity(const NonlinearModel& model) {
  return [model](const Eigen::VectorXd& u) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index n = 0; n < u.size(); ++n) out[n] = model.modified(u[n]);
    return out;
  };
}

Field etd1_step(const Field& u, double dt, const ExponentialPropagator& L, const NonlinearModel& model) {
  return L.op().to_field(etd1_step(L.op().to_vector(u), dt, L, modified_nonlinearity(model)));
}

Field etdrk2_step(const Field& u, double dt, const ExponentialPropagator& L, const NonlinearModel& model) {
  return L.op().to_field(etdrk2_step(L.op().to_vector(u), dt, L, modified_nonlinearity(model)));
}

Field newton_solve_implicit(const SchemeCoeffs& c, const History& hist, const NonlinearModel& model,
                            NewtonReport* report) {
  const Field H = history_term(c, hist, model.B);
  const auto& g = H.grid();
  const DenseOperator op = assemble_operator(g, model.alpha, model.B);
  const double dt = hist.dt;
  const double diag = c.beta * c.a0() + c.beta * model.B * dt;
  const double bdt = c.beta * dt;
  const Eigen::VectorXd h = op.to_vector(H);
  const double h_norm = g.h * h.norm();
  const double target = 1e-12 * (1.0 + h_norm);

  Eigen::VectorXd x = op.to_vector(hist.levels.front());
  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r = diag * v - bdt * (op.L * v) - h;
    for (Eigen::Index n = 0; n < v.size(); ++n) r[n] -= bdt * model.modified(v[n]);
    return r;
  };
  constexpr int kMaxNewton = 50;
  Eigen::VectorXd r = residual(x);
  double rnorm = g.h * r.norm();
  int it = 0;
  while (rnorm > target) {
    if (it == kMaxNewton) {
      std::ostringstream os;
      os << "Newton did not converge in " << kMaxNewton << " iterations (residual " << rnorm << ")";
      throw SolverError(os.str(), rnorm, 0.0);
    }
    Eigen::MatrixXd J = -bdt * op.L;
    for (Eigen::Index n = 0; n < x.size(); ++n) J(n, n) += diag - bdt * (model.derivative(x[n]) + model.B);
    x -= J.partialPivLu().solve(r);
    r = residual(x);
    rnorm = g.h * r.norm();
    ++it;
  }
  if (report) *report = {it, rnorm};
  return op.to_field(x);
}

}  // namespace sbdf::etd
