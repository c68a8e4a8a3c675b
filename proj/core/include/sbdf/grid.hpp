#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sbdf {

enum class Boundary : std::uint8_t { Periodic = 0, DirichletZero = 1, NeumannZero = 2 };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

/// Per-edge boundary condition. Periodic must come in matched opposite pairs.
struct BoundarySpec {
  Boundary left = Boundary::Periodic;
  Boundary right = Boundary::Periodic;
  Boundary bottom = Boundary::Periodic;
  Boundary top = Boundary::Periodic;

  static BoundarySpec uniform(Boundary b) { return {b, b, b, b}; }

  /// Packs the four edges into 2 bits each: left | right<<2 | bottom<<4 | top<<6.
  std::uint32_t code() const;
  static BoundarySpec from_code(std::uint32_t code);

  bool operator==(const BoundarySpec&) const = default;
};

/// Node-centred uniform grid. Node (i, j) sits at (i*h, j*h); i runs along x
/// (left to right), j along y (bottom to top).
struct GridSpec {
  int nx = 2;
  int ny = 2;
  double h = 1.0;
  BoundarySpec bc{};

  /// Throws std::invalid_argument on nx, ny < 2, non-positive h or an
  /// unpaired periodic edge.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }

  /// True for nodes on a DirichletZero edge (held at 0, not evolved).
  bool is_dirichlet(int i, int j) const;
  std::size_t evolved_count() const;

  bool operator==(const GridSpec&) const = default;
};

/// Grid function stored row-major (one row per j).
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0);
  Field(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t n) { return values_[n]; }
  double operator[](std::size_t n) const { return values_[n]; }

  /// Zeroes every DirichletZero node.
  void enforce_dirichlet();
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);

  bool operator==(const Field&) const = default;

 private:
  GridSpec grid_{};
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Throws std::invalid_argument when the two fields live on different grids.
void require_same_grid(const Field& a, const Field& b);
/// Throws sbdf::NonFiniteError naming the first offending node.
void require_finite(const Field& u, std::string_view what);

/// Five-point Laplacian. Periodic edges wrap, NeumannZero edges use a ghost
/// equal to the boundary node (zero flux), DirichletZero nodes read as 0 and
/// produce 0.
Field apply_laplacian(const Field& u);

/// Sum of the four neighbours with the same ghost rules as apply_laplacian.
Field neighbor_sum(const Field& u);

// Reductions sum each row left to right, then the row sums bottom to top.
// The order does not depend on the thread count.

double l2_norm(const Field& u);
double linf_norm(const Field& u);
double inner(const Field& u, const Field& v);
double l2_distance(const Field& u, const Field& v);

/// ||grad_h u||^2: sum over grid edges of squared differences (the h^2 weight
/// of the inner product cancels the 1/h^2 of the difference quotient).
/// Dirichlet nodes enter with value 0; Neumann ghost edges contribute nothing.
double grad_norm_sq(const Field& u);
/// Polarisation of grad_norm_sq; satisfies grad_bilinear(u, v) == -inner(u, apply_laplacian(v)).
double grad_bilinear(const Field& u, const Field& v);

namespace detail {

// Unchecked kernels used by the time steppers. `out` is fully overwritten.
void neighbor_sum_into(const GridSpec& g, std::span<const double> u, std::span<double> out);
void laplacian_into(const GridSpec& g, std::span<const double> u, std::span<double> out);
double sum_sq_diff(const GridSpec& g, std::span<const double> a, std::span<const double> b);

}  // namespace detail

}  // namespace sbdf
