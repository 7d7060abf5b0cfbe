#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Sparse>

namespace pulsefront {

using Vec2 = std::array<double, 2>;
using Field = std::vector<double>;
using VectorField = std::vector<Vec2>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// 2x2 matrix stored row-major; for one-dimensional cells only xx is used.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  static Mat2 diagonal(double a, double b) { return {a, 0.0, 0.0, b}; }
  Vec2 apply(const Vec2& v) const { return {xx * v[0] + xy * v[1], yx * v[0] + yy * v[1]}; }
  double quadratic(const Vec2& v) const {
    return v[0] * (xx * v[0] + xy * v[1]) + v[1] * (yx * v[0] + yy * v[1]);
  }
};

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

enum class Geometry { Torus, Cylinder };

/// Periodicity cell. The torus has every axis periodic (d = N); the cylinder
/// is periodic along x and bounded by flat walls y = 0 and y = H.
struct CellSpec {
  int dim_total = 1;
  int dim_periodic = 1;
  std::vector<double> periods{1.0};
  Geometry geometry = Geometry::Torus;
  double cylinder_height = 0.0;
  std::vector<double> direction{1.0};

  /// Throws std::invalid_argument on any inconsistency.
  void validate() const;

  /// e padded with zeros to the full dimension N.
  Vec2 e_tilde() const;

  static CellSpec torus1d(double period = 1.0, double direction = 1.0);
  static CellSpec torus2d(double period_x, double period_y, Vec2 direction = {1.0, 0.0});
  static CellSpec cylinder(double period, double height, double direction = 1.0);
};

enum class AxisKind { Periodic, Wall };

struct Axis {
  int n = 0;
  double h = 0.0;
  AxisKind kind = AxisKind::Periodic;
};

/// Uniform node lattice. Node (i, j) has flat index i + n_x * j.
class Grid {
 public:
  Grid(const CellSpec& spec, std::vector<int> nodes_per_axis);

  /// A strip of `periods` copies of the cell along x, with wall-type ends.
  static Grid strip(const Grid& cell, int periods);

  const CellSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  const Axis& axis(int a) const { return axes_[a]; }
  int n(int a) const { return axes_[a].n; }
  double h(int a) const { return axes_[a].h; }
  bool periodic(int a) const { return axes_[a].kind == AxisKind::Periodic; }
  std::size_t size() const { return size_; }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(axes_[0].n) * static_cast<std::size_t>(j);
  }
  std::array<int, 2> coords(std::size_t node) const {
    const int nx = axes_[0].n;
    return {static_cast<int>(node % nx), static_cast<int>(node / nx)};
  }
  Vec2 point(std::size_t node) const;

  /// Neighbour index `offset` steps along `axis`: wrap-around on periodic
  /// axes, mirror reflection on wall axes.
  std::size_t neighbor(std::size_t node, int axis, int offset) const;
  int reflect(int a, int i) const;

  bool on_wall(std::size_t node) const;
  /// Quadrature weight of a node (trapezoidal halving at walls), sums to |C|.
  double weight(std::size_t node) const;
  double measure() const;

  /// Whether the grid is a strip built by Grid::strip.
  int strip_periods() const { return strip_periods_; }

 private:
  Grid() = default;

  CellSpec spec_;
  int dim_ = 1;
  std::array<Axis, 2> axes_{};
  std::size_t size_ = 0;
  int strip_periods_ = 0;
};

Grid build_grid(const CellSpec& spec, std::vector<int> nodes_per_axis);

/// Reflection parity used at wall axes: scalar fields reflect evenly; the
/// wall-normal component of a vector field reflects oddly.
enum class Parity { Even, Odd };

/// Discrete difference operators on a grid, assembled once.
class StencilSet {
 public:
  explicit StencilSet(const Grid& grid);

  const Grid& grid() const { return grid_; }

  /// Centered first derivative along `axis`.
  const SparseMatrix& derivative(int axis, Parity parity = Parity::Even) const;

  VectorField gradient(const Field& u) const;
  Field divergence(const VectorField& v) const;

  /// Conservative-flux discretization of div(A grad .) with arithmetic face
  /// averaging of the nodal A, plus centered mixed-derivative terms.
  SparseMatrix div_A_grad(const std::vector<Mat2>& A) const;
  Field apply_div_A_grad(const std::vector<Mat2>& A, const Field& u) const;

  /// Matrix of b . grad u; upwind picks, per axis and node, the one-sided
  /// difference whose off-diagonal coefficient is non-negative.
  SparseMatrix drift(const VectorField& b, bool upwind) const;

 private:
  Grid grid_;
  std::array<SparseMatrix, 2> d_even_;
  std::array<SparseMatrix, 2> d_odd_;
};

StencilSet diff_ops(const Grid& grid);

/// Node-weighted inner product <u, v> = sum w_i u_i v_i.
double inner(const Grid& grid, const Field& u, const Field& v);

}  // namespace pulsefront
