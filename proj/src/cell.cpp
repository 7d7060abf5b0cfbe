#include "pulsefront/cell.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pulsefront {

void CellSpec::validate() const {
  if (dim_total < 1 || dim_total > 2) throw std::invalid_argument("cell: dim_total must be 1 or 2");
  if (dim_periodic < 1 || dim_periodic > dim_total)
    throw std::invalid_argument("cell: dim_periodic must satisfy 1 <= d <= N");
  if (geometry == Geometry::Torus && dim_periodic != dim_total)
    throw std::invalid_argument("cell: torus requires d = N");
  if (geometry == Geometry::Cylinder && (dim_periodic != 1 || dim_total != 2))
    throw std::invalid_argument("cell: cylinder requires d = 1, N = 2");
  if (static_cast<int>(periods.size()) != dim_periodic)
    throw std::invalid_argument("cell: expected " + std::to_string(dim_periodic) + " periods");
  for (double L : periods)
    if (!(L > 0.0)) throw std::invalid_argument("cell: periods must be positive");
  if (geometry == Geometry::Cylinder && !(cylinder_height > 0.0))
    throw std::invalid_argument("cell: cylinder height must be positive");
  if (static_cast<int>(direction.size()) != dim_periodic)
    throw std::invalid_argument("cell: direction must have d components");
  double norm2 = 0.0;
  for (double c : direction) norm2 += c * c;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw std::invalid_argument("cell: direction must be a unit vector");
}

Vec2 CellSpec::e_tilde() const {
  Vec2 e{0.0, 0.0};
  for (int i = 0; i < dim_periodic; ++i) e[i] = direction[i];
  return e;
}

CellSpec CellSpec::torus1d(double period, double dir) {
  CellSpec s;
  s.dim_total = 1;
  s.dim_periodic = 1;
  s.periods = {period};
  s.geometry = Geometry::Torus;
  s.direction = {dir};
  return s;
}

CellSpec CellSpec::torus2d(double period_x, double period_y, Vec2 dir) {
  CellSpec s;
  s.dim_total = 2;
  s.dim_periodic = 2;
  s.periods = {period_x, period_y};
  s.geometry = Geometry::Torus;
  s.direction = {dir[0], dir[1]};
  return s;
}

CellSpec CellSpec::cylinder(double period, double height, double dir) {
  CellSpec s;
  s.dim_total = 2;
  s.dim_periodic = 1;
  s.periods = {period};
  s.geometry = Geometry::Cylinder;
  s.cylinder_height = height;
  s.direction = {dir};
  return s;
}

Grid::Grid(const CellSpec& spec, std::vector<int> nodes)
    : spec_(spec), dim_(spec.dim_total) {
  spec_.validate();
  if (static_cast<int>(nodes.size()) != dim_)
    throw std::invalid_argument("grid: need one node count per axis");
  for (int n : nodes)
    if (n < 4) throw std::invalid_argument("grid: at least 4 nodes per axis (stencil width)");
  axes_[0] = {nodes[0], spec.periods[0] / nodes[0], AxisKind::Periodic};
  if (dim_ == 2) {
    if (spec.geometry == Geometry::Torus)
      axes_[1] = {nodes[1], spec.periods[1] / nodes[1], AxisKind::Periodic};
    else
      axes_[1] = {nodes[1], spec.cylinder_height / (nodes[1] - 1), AxisKind::Wall};
  } else {
    axes_[1] = {1, 1.0, AxisKind::Periodic};
  }
  size_ = static_cast<std::size_t>(axes_[0].n) * static_cast<std::size_t>(axes_[1].n);
}

Grid Grid::strip(const Grid& cell, int periods) {
  if (periods < 1) throw std::invalid_argument("strip: need at least one period");
  if (cell.strip_periods_ != 0) throw std::invalid_argument("strip: base grid is already a strip");
  Grid g;
  g.spec_ = cell.spec_;
  g.dim_ = cell.dim_;
  g.axes_ = cell.axes_;
  g.axes_[0].n = cell.axes_[0].n * periods;
  g.axes_[0].kind = AxisKind::Wall;
  g.size_ = static_cast<std::size_t>(g.axes_[0].n) * static_cast<std::size_t>(g.axes_[1].n);
  g.strip_periods_ = periods;
  return g;
}

Vec2 Grid::point(std::size_t node) const {
  const auto c = coords(node);
  return {c[0] * axes_[0].h, dim_ == 2 ? c[1] * axes_[1].h : 0.0};
}

int Grid::reflect(int a, int i) const {
  const int n = axes_[a].n;
  if (axes_[a].kind == AxisKind::Periodic) return ((i % n) + n) % n;
  // mirror about the end nodes: -1 -> 1, n -> n-2
  const int period = 2 * (n - 1);
  int r = ((i % period) + period) % period;
  return r < n ? r : period - r;
}

std::size_t Grid::neighbor(std::size_t node, int axis, int offset) const {
  auto c = coords(node);
  c[axis] = reflect(axis, c[axis] + offset);
  return index(c[0], c[1]);
}

bool Grid::on_wall(std::size_t node) const {
  const auto c = coords(node);
  for (int a = 0; a < dim_; ++a)
    if (axes_[a].kind == AxisKind::Wall && (c[a] == 0 || c[a] == axes_[a].n - 1)) return true;
  return false;
}

double Grid::weight(std::size_t node) const {
  const auto c = coords(node);
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) {
    w *= axes_[a].h;
    if (axes_[a].kind == AxisKind::Wall && (c[a] == 0 || c[a] == axes_[a].n - 1)) w *= 0.5;
  }
  return w;
}

double Grid::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a)
    m *= axes_[a].kind == AxisKind::Periodic ? axes_[a].n * axes_[a].h : (axes_[a].n - 1) * axes_[a].h;
  return m;
}

Grid build_grid(const CellSpec& spec, std::vector<int> nodes_per_axis) {
  return Grid(spec, std::move(nodes_per_axis));
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(std::size_t n, const Triplets& t) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseMatrix centered_derivative(const Grid& g, int axis, Parity parity) {
  Triplets t;
  const std::size_t n = g.size();
  if (axis >= g.dim()) return from_triplets(n, t);
  t.reserve(2 * n);
  const double inv2h = 0.5 / g.h(axis);
  const int na = g.n(axis);
  for (std::size_t p = 0; p < n; ++p) {
    const auto c = g.coords(p);
    const bool wall = g.axis(axis).kind == AxisKind::Wall;
    if (wall && (c[axis] == 0 || c[axis] == na - 1)) {
      // ghost value u_{-1} = +-u_1 (or mirror at the far end)
      if (parity == Parity::Even) continue;
      const int inner_i = c[axis] == 0 ? 1 : na - 2;
      auto ci = c;
      ci[axis] = inner_i;
      const double sign = c[axis] == 0 ? 1.0 : -1.0;
      t.emplace_back(p, g.index(ci[0], ci[1]), 2.0 * sign * inv2h);
      continue;
    }
    t.emplace_back(p, g.neighbor(p, axis, +1), inv2h);
    t.emplace_back(p, g.neighbor(p, axis, -1), -inv2h);
  }
  return from_triplets(n, t);
}

double face_average(double a, double b) { return 0.5 * (a + b); }

double diag_entry(const Mat2& m, int axis) { return axis == 0 ? m.xx : m.yy; }

}  // namespace

StencilSet::StencilSet(const Grid& grid) : grid_(grid) {
  for (int a = 0; a < 2; ++a) {
    d_even_[a] = centered_derivative(grid_, a, Parity::Even);
    d_odd_[a] = centered_derivative(grid_, a, Parity::Odd);
  }
}

const SparseMatrix& StencilSet::derivative(int axis, Parity parity) const {
  return parity == Parity::Even ? d_even_[axis] : d_odd_[axis];
}

VectorField StencilSet::gradient(const Field& u) const {
  Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  VectorField g(u.size(), Vec2{0.0, 0.0});
  for (int a = 0; a < grid_.dim(); ++a) {
    Eigen::VectorXd d = d_even_[a] * uv;
    for (std::size_t i = 0; i < u.size(); ++i) g[i][a] = d[static_cast<Eigen::Index>(i)];
  }
  return g;
}

Field StencilSet::divergence(const VectorField& v) const {
  const std::size_t n = v.size();
  Field out(n, 0.0);
  for (int a = 0; a < grid_.dim(); ++a) {
    Eigen::VectorXd comp(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) comp[static_cast<Eigen::Index>(i)] = v[i][a];
    Eigen::VectorXd d = d_odd_[a] * comp;
    for (std::size_t i = 0; i < n; ++i) out[i] += d[static_cast<Eigen::Index>(i)];
  }
  return out;
}

SparseMatrix StencilSet::div_A_grad(const std::vector<Mat2>& A) const {
  const Grid& g = grid_;
  const std::size_t n = g.size();
  if (A.size() != n) throw std::invalid_argument("div_A_grad: diffusion field size mismatch");
  Triplets t;
  t.reserve(5 * n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto c = g.coords(p);
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double inv_h2 = 1.0 / (g.h(a) * g.h(a));
      const int na = g.n(a);
      const bool wall = g.axis(a).kind == AxisKind::Wall;
      const double ap = diag_entry(A[p], a);
      if (wall && (c[a] == 0 || c[a] == na - 1)) {
        // mirror ghost: both faces carry the inner face coefficient
        const std::size_t q = g.neighbor(p, a, c[a] == 0 ? +1 : -1);
        const double w = 2.0 * face_average(ap, diag_entry(A[q], a)) * inv_h2;
        t.emplace_back(p, q, w);
        diag -= w;
        continue;
      }
      const std::size_t qp = g.neighbor(p, a, +1);
      const std::size_t qm = g.neighbor(p, a, -1);
      const double wp = face_average(ap, diag_entry(A[qp], a)) * inv_h2;
      const double wm = face_average(ap, diag_entry(A[qm], a)) * inv_h2;
      t.emplace_back(p, qp, wp);
      t.emplace_back(p, qm, wm);
      diag -= wp + wm;
    }
    t.emplace_back(p, p, diag);
  }
  SparseMatrix m = from_triplets(n, t);

  if (g.dim() == 2) {
    bool has_cross = false;
    Eigen::VectorXd axy(static_cast<Eigen::Index>(n)), ayx(static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) {
      axy[static_cast<Eigen::Index>(p)] = A[p].xy;
      ayx[static_cast<Eigen::Index>(p)] = A[p].yx;
      if (A[p].xy != 0.0 || A[p].yx != 0.0) has_cross = true;
    }
    if (has_cross) {
      SparseMatrix cross = d_odd_[0] * axy.asDiagonal() * d_even_[1];
      SparseMatrix cross2 = d_odd_[1] * ayx.asDiagonal() * d_even_[0];
      m = m + cross + cross2;
      m.prune(0.0);
      m.makeCompressed();
    }
  }
  return m;
}

Field StencilSet::apply_div_A_grad(const std::vector<Mat2>& A, const Field& u) const {
  const SparseMatrix m = div_A_grad(A);
  Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd r = m * uv;
  return Field(r.data(), r.data() + r.size());
}

SparseMatrix StencilSet::drift(const VectorField& b, bool upwind) const {
  const Grid& g = grid_;
  const std::size_t n = g.size();
  if (b.size() != n) throw std::invalid_argument("drift: field size mismatch");
  Triplets t;
  t.reserve(3 * n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto c = g.coords(p);
    for (int a = 0; a < g.dim(); ++a) {
      const double ba = b[p][a];
      if (ba == 0.0) continue;
      const double h = g.h(a);
      const bool wall = g.axis(a).kind == AxisKind::Wall;
      const bool at_wall = wall && (c[a] == 0 || c[a] == g.n(a) - 1);
      const std::size_t qp = g.neighbor(p, a, +1);
      const std::size_t qm = g.neighbor(p, a, -1);
      if (upwind) {
        if (ba > 0.0) {
          t.emplace_back(p, qp, ba / h);
          t.emplace_back(p, p, -ba / h);
        } else {
          t.emplace_back(p, qm, -ba / h);
          t.emplace_back(p, p, ba / h);
        }
      } else {
        if (at_wall) continue;  // even reflection: centered difference vanishes
        t.emplace_back(p, qp, 0.5 * ba / h);
        t.emplace_back(p, qm, -0.5 * ba / h);
      }
    }
  }
  return from_triplets(n, t);
}

StencilSet diff_ops(const Grid& grid) { return StencilSet(grid); }

double inner(const Grid& grid, const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += grid.weight(i) * u[i] * v[i];
  return s;
}

}  // namespace pulsefront
