#include "pulsefront/spectral.hpp"

#include <cmath>
#include <numbers>

namespace pulsefront {

Eigen::MatrixXd periodic_diff_matrix(int n, double period) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const double scale = 2.0 * std::numbers::pi / period;
  const double h = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      if (n % 2 == 0)
        D(i, j) = 0.5 * sgn / std::tan(0.5 * k * h);
      else
        D(i, j) = 0.5 * sgn / std::sin(0.5 * k * h);
    }
  return scale * D;
}

namespace {

Eigen::MatrixXd wall_diff_matrix(int n, double h) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i) {
    D(i, i + 1) = 0.5 / h;
    D(i, i - 1) = -0.5 / h;
  }
  D(0, 0) = -1.5 / h;
  D(0, 1) = 2.0 / h;
  D(0, 2) = -0.5 / h;
  D(n - 1, n - 1) = 1.5 / h;
  D(n - 1, n - 2) = -2.0 / h;
  D(n - 1, n - 3) = 0.5 / h;
  return D;
}

}  // namespace

NodalDifferentiator::NodalDifferentiator(const Grid& grid) : grid_(&grid) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.periodic(a))
      d_[a] = periodic_diff_matrix(grid.n(a), grid.n(a) * grid.h(a));
    else
      d_[a] = wall_diff_matrix(grid.n(a), grid.h(a));
  }
}

Field NodalDifferentiator::derivative(const Field& u, int axis) const {
  const Grid& g = *grid_;
  Field out(u.size(), 0.0);
  if (axis >= g.dim()) return out;
  const int nx = g.n(0);
  const int ny = g.dim() == 2 ? g.n(1) : 1;
  const Eigen::MatrixXd& D = d_[axis];
  if (axis == 0) {
    for (int j = 0; j < ny; ++j) {
      Eigen::Map<const Eigen::VectorXd> row(u.data() + static_cast<std::size_t>(j) * nx, nx);
      Eigen::Map<Eigen::VectorXd> dst(out.data() + static_cast<std::size_t>(j) * nx, nx);
      dst = D * row;
    }
  } else {
    Eigen::VectorXd col(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) col[j] = u[g.index(i, j)];
      Eigen::VectorXd r = D * col;
      for (int j = 0; j < ny; ++j) out[g.index(i, j)] = r[j];
    }
  }
  return out;
}

VectorField NodalDifferentiator::gradient(const Field& u) const {
  VectorField g(u.size(), Vec2{0.0, 0.0});
  for (int a = 0; a < grid_->dim(); ++a) {
    const Field d = derivative(u, a);
    for (std::size_t i = 0; i < u.size(); ++i) g[i][a] = d[i];
  }
  return g;
}

}  // namespace pulsefront
