#include "sbdf/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "sbdf/errors.hpp"
#include "sbdf/parallel.hpp"

namespace sbdf {

std::string_view to_string(Boundary b) {
  switch (b) {
    case Boundary::Periodic: return "periodic";
    case Boundary::DirichletZero: return "dirichlet";
    case Boundary::NeumannZero: return "neumann";
  }
  return "?";
}

Boundary boundary_from_string(std::string_view s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "dirichlet") return Boundary::DirichletZero;
  if (s == "neumann") return Boundary::NeumannZero;
  throw std::invalid_argument("unknown boundary kind '" + std::string(s) +
                              "' (expected periodic, dirichlet or neumann)");
}

std::uint32_t BoundarySpec::code() const {
  auto c = [](Boundary b) { return static_cast<std::uint32_t>(b); };
  return c(left) | (c(right) << 2) | (c(bottom) << 4) | (c(top) << 6);
}

BoundarySpec BoundarySpec::from_code(std::uint32_t code) {
  auto d = [code](int shift) {
    const auto v = (code >> shift) & 3u;
    if (v > 2) throw std::invalid_argument("invalid boundary code");
    return static_cast<Boundary>(v);
  };
  if (code >> 8) throw std::invalid_argument("invalid boundary code");
  return {d(0), d(2), d(4), d(6)};
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs nx, ny >= 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid spacing h must be positive");
  const bool px = bc.left == Boundary::Periodic, qx = bc.right == Boundary::Periodic;
  const bool py = bc.bottom == Boundary::Periodic, qy = bc.top == Boundary::Periodic;
  if (px != qx) throw std::invalid_argument("periodic x boundary must be set on both left and right");
  if (py != qy) throw std::invalid_argument("periodic y boundary must be set on both bottom and top");
}

bool GridSpec::is_dirichlet(int i, int j) const {
  return (i == 0 && bc.left == Boundary::DirichletZero) ||
         (i == nx - 1 && bc.right == Boundary::DirichletZero) ||
         (j == 0 && bc.bottom == Boundary::DirichletZero) ||
         (j == ny - 1 && bc.top == Boundary::DirichletZero);
}

std::size_t GridSpec::evolved_count() const {
  std::size_t n = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) n += is_dirichlet(i, j) ? 0 : 1;
  return n;
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {
  grid_.validate();
}

Field::Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw std::invalid_argument("field value count does not match grid");
}

void Field::enforce_dirichlet() {
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i)
      if (grid_.is_dirichlet(i, j)) (*this)(i, j) = 0.0;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

void require_finite(const Field& u, std::string_view what) {
  const auto& g = u.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!std::isfinite(u(i, j))) throw NonFiniteError(std::string(what), i, j);
}

namespace {

bool dirichlet_row(const GridSpec& g, int j) {
  return (j == 0 && g.bc.bottom == Boundary::DirichletZero) ||
         (j == g.ny - 1 && g.bc.top == Boundary::DirichletZero);
}

// Calls emit(n, centre, neighbour_sum) for every evolved node and zero(n) for
// every Dirichlet node.
template <class Emit, class Zero>
void stencil_rows(const GridSpec& g, const double* u, int j0, int j1, Emit emit, Zero zero) {
  const int nx = g.nx, ny = g.ny;
  const bool dl = g.bc.left == Boundary::DirichletZero, dr = g.bc.right == Boundary::DirichletZero;
  for (int j = j0; j < j1; ++j) {
    const double* row = u + static_cast<std::size_t>(j) * nx;
    const std::size_t base = static_cast<std::size_t>(j) * nx;
    if (dirichlet_row(g, j)) {
      for (int i = 0; i < nx; ++i) zero(base + i);
      continue;
    }
    // nullptr stands for a row of zeros (Dirichlet neighbour row).
    const double* south;
    if (j > 0) south = dirichlet_row(g, j - 1) ? nullptr : row - nx;
    else south = g.bc.bottom == Boundary::Periodic ? u + static_cast<std::size_t>(ny - 1) * nx : row;
    const double* north;
    if (j < ny - 1) north = dirichlet_row(g, j + 1) ? nullptr : row + nx;
    else north = g.bc.top == Boundary::Periodic ? u : row;

    for (int i = 0; i < nx; ++i) {
      if ((i == 0 && dl) || (i == nx - 1 && dr)) {
        zero(base + i);
        continue;
      }
      const double c = row[i];
      double w, e;
      if (i > 0) w = (i - 1 == 0 && dl) ? 0.0 : row[i - 1];
      else w = g.bc.left == Boundary::Periodic ? row[nx - 1] : c;
      if (i < nx - 1) e = (i + 1 == nx - 1 && dr) ? 0.0 : row[i + 1];
      else e = g.bc.right == Boundary::Periodic ? row[0] : c;
      const double s = south ? south[i] : 0.0;
      const double n = north ? north[i] : 0.0;
      emit(base + i, c, (w + e) + (s + n));
    }
  }
}

double masked(const GridSpec& g, const double* u, int i, int j) {
  return g.is_dirichlet(i, j) ? 0.0 : u[g.index(i, j)];
}

// Row j owns its x-edges and the y-edge(s) to row j+1 (with wrap).
double edge_row_sum(const GridSpec& g, const double* a, const double* b, int j) {
  double s = 0.0;
  const int nx = g.nx, ny = g.ny;
  auto term = [&](int i0, int j0, int i1, int j1) {
    const double da = masked(g, a, i1, j1) - masked(g, a, i0, j0);
    const double db = masked(g, b, i1, j1) - masked(g, b, i0, j0);
    s += da * db;
  };
  for (int i = 0; i + 1 < nx; ++i) term(i, j, i + 1, j);
  if (g.bc.left == Boundary::Periodic) term(nx - 1, j, 0, j);
  if (j + 1 < ny) {
    for (int i = 0; i < nx; ++i) term(i, j, i, j + 1);
  } else if (g.bc.bottom == Boundary::Periodic) {
    for (int i = 0; i < nx; ++i) term(i, j, i, 0);
  }
  return s;
}

template <class RowFn>
double reduce_rows(const GridSpec& g, RowFn row_fn) {
  std::vector<double> partial(static_cast<std::size_t>(g.ny), 0.0);
  for_rows(g.ny, [&](int b, int e) {
    for (int j = b; j < e; ++j) partial[static_cast<std::size_t>(j)] = row_fn(j);
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace

namespace detail {

void neighbor_sum_into(const GridSpec& g, std::span<const double> u, std::span<double> out) {
  for_rows(g.ny, [&](int b, int e) {
    stencil_rows(
        g, u.data(), b, e, [&](std::size_t n, double, double nb) { out[n] = nb; },
        [&](std::size_t n) { out[n] = 0.0; });
  });
}

void laplacian_into(const GridSpec& g, std::span<const double> u, std::span<double> out) {
  const double inv_h2 = 1.0 / (g.h * g.h);
  for_rows(g.ny, [&](int b, int e) {
    stencil_rows(
        g, u.data(), b, e, [&](std::size_t n, double c, double nb) { out[n] = (nb - 4.0 * c) * inv_h2; },
        [&](std::size_t n) { out[n] = 0.0; });
  });
}

double sum_sq_diff(const GridSpec& g, std::span<const double> a, std::span<const double> b) {
  return reduce_rows(g, [&](int j) {
    const std::size_t base = static_cast<std::size_t>(j) * g.nx;
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      const double d = a[base + i] - b[base + i];
      s += d * d;
    }
    return s;
  });
}

}  // namespace detail

Field apply_laplacian(const Field& u) {
  require_finite(u, "apply_laplacian input");
  Field out(u.grid());
  detail::laplacian_into(u.grid(), u.values(), out.values());
  return out;
}

Field neighbor_sum(const Field& u) {
  require_finite(u, "neighbor_sum input");
  Field out(u.grid());
  detail::neighbor_sum_into(u.grid(), u.values(), out.values());
  return out;
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto& g = u.grid();
  const double s = reduce_rows(g, [&](int j) {
    const std::size_t base = static_cast<std::size_t>(j) * g.nx;
    double r = 0.0;
    for (int i = 0; i < g.nx; ++i) r += u[base + i] * v[base + i];
    return r;
  });
  return g.h * g.h * s;
}

double l2_norm(const Field& u) {
  const auto& g = u.grid();
  const double s = reduce_rows(g, [&](int j) {
    const std::size_t base = static_cast<std::size_t>(j) * g.nx;
    double r = 0.0;
    for (int i = 0; i < g.nx; ++i) r += u[base + i] * u[base + i];
    return r;
  });
  return g.h * std::sqrt(s);
}

double l2_distance(const Field& u, const Field& v) {
  require_same_grid(u, v);
  return u.grid().h * std::sqrt(detail::sum_sq_diff(u.grid(), u.values(), v.values()));
}

double linf_norm(const Field& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double grad_bilinear(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto& g = u.grid();
  return reduce_rows(g, [&](int j) { return edge_row_sum(g, u.values().data(), v.values().data(), j); });
}

double grad_norm_sq(const Field& u) { return grad_bilinear(u, u); }

}  // namespace sbdf
