#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace support;

TEST_CASE("grid spacing, indexing and weights") {
  const Grid t = torus2(8, 6, 2.0, 3.0);
  CHECK(t.h(0) == doctest::Approx(0.25));
  CHECK(t.h(1) == doctest::Approx(0.5));
  CHECK(t.index(3, 2) == 3 + 8 * 2);
  CHECK(t.neighbor(t.index(7, 0), 0, 1) == t.index(0, 0));
  CHECK(t.neighbor(t.index(0, 0), 1, -1) == t.index(0, 5));
  double w = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) w += t.weight(i);
  CHECK(w == doctest::Approx(6.0));

  const Grid c = cylinder(8, 5, 1.0, 2.0);
  CHECK(c.h(1) == doctest::Approx(0.5));
  CHECK(c.neighbor(c.index(2, 0), 1, -1) == c.index(2, 1));
  CHECK(c.neighbor(c.index(2, 4), 1, 1) == c.index(2, 3));
  CHECK(c.on_wall(c.index(3, 0)));
  CHECK_FALSE(c.on_wall(c.index(3, 2)));
  w = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) w += c.weight(i);
  CHECK(w == doctest::Approx(c.measure()));
  CHECK(c.measure() == doctest::Approx(2.0));
}

TEST_CASE("cell validation rejects inconsistent data") {
  CHECK_THROWS_AS(Grid(CellSpec::torus1d(1.0), {3}), std::invalid_argument);
  CellSpec s = CellSpec::torus2d(1.0, 1.0, {0.6, 0.6});
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(CellSpec::cylinder(1.0, -1.0).validate(), std::invalid_argument);
}

TEST_CASE("constant-coefficient Laplacian matches the discrete symbol") {
  const int n = 32;
  const Grid g = torus1(n);
  const StencilSet ops(g);
  const SparseMatrix D = ops.div_A_grad(DiffusionField::constant(g, Mat2::diagonal(2.0, 0.0)).A);
  const Field u = sample(g, [](const Vec2& p) { return std::sin(kTwoPi * 3 * p[0]); });
  const Field Du = multiply(D, u);
  const double h = g.h(0);
  const double symbol = -2.0 * 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * 3 * h), 2);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(Du[i] == doctest::Approx(symbol * u[i]).epsilon(1e-10));
}

TEST_CASE("centered derivative matches its symbol and wall parity") {
  const Grid g = torus2(16, 8);
  const StencilSet ops(g);
  const Field u = sample(g, [](const Vec2& p) { return std::sin(kTwoPi * p[0]) * std::cos(kTwoPi * p[1]); });
  const VectorField gu = ops.gradient(u);
  const double hx = g.h(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2 p = g.point(i);
    CHECK(gu[i][0] ==
          doctest::Approx(std::sin(kTwoPi * hx) / hx * std::cos(kTwoPi * p[0]) * std::cos(kTwoPi * p[1])).epsilon(1e-10));
  }
  // even reflection: derivative of a wall-symmetric field vanishes on the wall
  const Grid c = cylinder(8, 9);
  const Field v = sample(c, [](const Vec2& p) { return std::cos(std::numbers::pi * p[1]); });
  const VectorField gv = StencilSet(c).gradient(v);
  for (int i = 0; i < 8; ++i) CHECK(gv[c.index(i, 0)][1] == doctest::Approx(0.0));
}

TEST_CASE("diffusion stencil conserves mass and is self-adjoint") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const Grid& g : {torus1(24), torus2(12, 10), cylinder(12, 7)}) {
    const DiffusionField A = wavy_diffusion(g);
    const SparseMatrix D = StencilSet(g).div_A_grad(A.A);
    Field u(g.size()), v(g.size());
    for (auto& x : u) x = U(rng);
    for (auto& x : v) x = U(rng);
    const Field Du = multiply(D, u), Dv = multiply(D, v);
    const Field one(g.size(), 1.0);
    CHECK(std::abs(inner(g, one, Du)) < 1e-10);
    CHECK(inner(g, u, Dv) == doctest::Approx(inner(g, Du, v)).epsilon(1e-12));
    // constants are in the kernel
    for (double x : multiply(D, one)) CHECK(std::abs(x) < 1e-10);
    CHECK(inner(g, u, Du) < 0.0);
  }
}

TEST_CASE("self-adjointness with off-diagonal constant tensor on the torus") {
  const Grid g = torus2(10, 12);
  const SparseMatrix D = StencilSet(g).div_A_grad(DiffusionField::constant(g, Mat2{1.0, 0.3, 0.3, 0.8}).A);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field u(g.size()), v(g.size());
  for (auto& x : u) x = U(rng);
  for (auto& x : v) x = U(rng);
  CHECK(inner(g, u, multiply(D, v)) == doctest::Approx(inner(g, multiply(D, u), v)).epsilon(1e-12));
}

TEST_CASE("upwind drift has non-negative off-diagonals and annihilates constants") {
  const Grid g = torus2(10, 10);
  VectorField b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2 p = g.point(i);
    b[i] = {std::sin(kTwoPi * p[1]), -0.5 + std::cos(kTwoPi * p[0])};
  }
  const StencilSet ops(g);
  const SparseMatrix M = ops.drift(b, true);
  for (Eigen::Index r = 0; r < M.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(M, r); it; ++it)
      if (it.col() != r) CHECK(it.value() >= 0.0);
  for (double x : multiply(M, Field(g.size(), 1.0))) CHECK(std::abs(x) < 1e-12);
  for (double x : multiply(ops.drift(b, false), Field(g.size(), 1.0))) CHECK(std::abs(x) < 1e-12);
}

TEST_CASE("discrete divergence is the negative adjoint of the gradient on the torus") {
  const Grid g = torus2(8, 12);
  const StencilSet ops(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field u(g.size());
  VectorField v(g.size());
  for (auto& x : u) x = U(rng);
  for (auto& x : v) x = {U(rng), U(rng)};
  const VectorField gu = ops.gradient(u);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) lhs += g.weight(i) * dot(gu[i], v[i]);
  CHECK(lhs == doctest::Approx(-inner(g, u, ops.divergence(v))).epsilon(1e-12));
}

TEST_CASE("strip grid repeats the cell along x with wall ends") {
  const Grid c = torus1(16);
  const Grid s = Grid::strip(c, 20);
  CHECK(s.n(0) == 320);
  CHECK_FALSE(s.periodic(0));
  CHECK(s.strip_periods() == 20);
  CHECK_THROWS_AS(Grid::strip(s, 2), std::invalid_argument);
}
