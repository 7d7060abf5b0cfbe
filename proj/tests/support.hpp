#pragma once

#include <cmath>
#include <numbers>

#include "pulsefront/cell.hpp"
#include "pulsefront/media.hpp"

namespace support {

using namespace pulsefront;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Grid torus1(int n, double L = 1.0) { return Grid(CellSpec::torus1d(L), {n}); }
inline Grid torus2(int nx, int ny, double Lx = 1.0, double Ly = 1.0) {
  return Grid(CellSpec::torus2d(Lx, Ly), {nx, ny});
}
inline Grid cylinder(int nx, int ny, double L = 1.0, double H = 1.0) { return Grid(CellSpec::cylinder(L, H), {nx, ny}); }

inline Field sample(const Grid& g, double (*fn)(const Vec2&)) {
  Field f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = fn(g.point(i));
  return f;
}

template <class Fn>
Field sample(const Grid& g, Fn fn) {
  Field f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = fn(g.point(i));
  return f;
}

inline Field multiply(const SparseMatrix& M, const Field& u) {
  Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd w = M * v;
  return Field(w.data(), w.data() + w.size());
}

// heterogeneous diagonal tensor on any cell
inline DiffusionField wavy_diffusion(const Grid& g) {
  const bool cyl = g.spec().geometry == Geometry::Cylinder;
  const double H = cyl ? g.spec().cylinder_height : 1.0;
  return DiffusionField::from_function(g, [&](const Vec2& p) {
    const double y = g.dim() == 2 ? (cyl ? std::cos(std::numbers::pi * p[1] / H) : std::sin(kTwoPi * p[1])) : 0.0;
    return Mat2::diagonal(1.0 + 0.3 * std::sin(kTwoPi * p[0]) + 0.2 * y, 1.0 + 0.25 * std::cos(kTwoPi * p[0]));
  });
}

}  // namespace support
