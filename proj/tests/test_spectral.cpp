#include <doctest.h>

#include "pulsefront/spectral.hpp"
#include "support.hpp"

using namespace support;

TEST_CASE("trigonometric differentiation is exact below the Nyquist mode") {
  for (int n : {15, 16}) {
    const double L = 2.0;
    const Eigen::MatrixXd D = periodic_diff_matrix(n, L);
    Eigen::VectorXd u(n), du(n);
    for (int i = 0; i < n; ++i) {
      const double x = L * i / n;
      u[i] = std::sin(kTwoPi * 3 * x / L) + 0.5 * std::cos(kTwoPi * 5 * x / L);
      du[i] = kTwoPi / L * (3 * std::cos(kTwoPi * 3 * x / L) - 2.5 * std::sin(kTwoPi * 5 * x / L));
    }
    CHECK((D * u - du).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((D * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("nodal differentiator on torus and wall axes") {
  const Grid g = cylinder(16, 9, 1.0, 2.0);
  const NodalDifferentiator nd(g);
  const Field u = sample(g, [](const Vec2& p) { return std::sin(kTwoPi * p[0]) + p[1] * p[1]; });
  const VectorField gu = nd.gradient(u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec2 p = g.point(i);
    CHECK(gu[i][0] == doctest::Approx(kTwoPi * std::cos(kTwoPi * p[0])).epsilon(1e-10));
    CHECK(gu[i][1] == doctest::Approx(2.0 * p[1]).epsilon(1e-10));
  }
}
