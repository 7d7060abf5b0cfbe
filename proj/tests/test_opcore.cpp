#include <doctest.h>

#include "pulsefront/bounds.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/opcore.hpp"
#include "support.hpp"

using namespace support;

TEST_CASE("L_lambda of constants for constant coefficients") {
  const Grid g = torus2(12, 10);
  const auto A = DiffusionField::constant(g, Mat2::diagonal(2.0, 0.7));
  const auto q = AdvectionField::rotated_gradient(
      g, [](const Vec2& p) { return std::sin(kTwoPi * p[0]) * std::cos(kTwoPi * p[1]); });
  const Field zeta(g.size(), 1.5);
  for (double lambda : {0.0, 0.5, 2.0}) {
    const OperatorMatrix M = assemble_Llambda(g, A, q, zeta, lambda, true);
    // q . e has zero mean but is not constant, so only the q = 0 part is checked pointwise
    const Field r = multiply(M.M, Field(g.size(), 1.0));
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(r[i] == doctest::Approx(2.0 * lambda * lambda + 1.5 + lambda * q.q[i][0]).epsilon(1e-12));
    for (Eigen::Index row = 0; row < M.M.outerSize(); ++row) {
      int nnz = 0;
      for (SparseMatrix::InnerIterator it(M.M, row); it; ++it) {
        ++nnz;
        if (it.col() != row) CHECK(it.value() >= 0.0);
      }
      CHECK(nnz <= 9);
    }
  }
  CHECK_THROWS_AS(assemble_Llambda(g, A, q, zeta, -1.0), std::invalid_argument);
}

TEST_CASE("centered L_lambda converges to the continuum operator") {
  // psi = exp(0.3 sin(2 pi x) cos(2 pi y)), A = diag(1.2, 0.8), q = (sin 2 pi y, 0)
  auto run = [](int n) {
    const Grid g = torus2(n, n);
    const auto A = DiffusionField::constant(g, Mat2::diagonal(1.2, 0.8));
    const auto q = AdvectionField::explicit_field(g, [](const Vec2& p) { return Vec2{std::sin(kTwoPi * p[1]), 0.0}; });
    const Field zeta = sample(g, [](const Vec2& p) { return 1.0 + 0.2 * std::cos(kTwoPi * p[0]); });
    const double lambda = 0.8;
    const OperatorMatrix M = assemble_Llambda(g, A, q, zeta, lambda, false);
    Field psi(g.size()), exact(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.point(i)[0], y = g.point(i)[1];
      const double L = 0.3 * std::sin(kTwoPi * x) * std::cos(kTwoPi * y);
      const double Lx = 0.3 * kTwoPi * std::cos(kTwoPi * x) * std::cos(kTwoPi * y);
      const double Ly = -0.3 * kTwoPi * std::sin(kTwoPi * x) * std::sin(kTwoPi * y);
      const double Lxx = -kTwoPi * kTwoPi * L, Lyy = -kTwoPi * kTwoPi * L;
      psi[i] = std::exp(L);
      const double px = psi[i] * Lx;
      const double pxx = psi[i] * (Lxx + Lx * Lx), pyy = psi[i] * (Lyy + Ly * Ly);
      const double qx = std::sin(kTwoPi * y);
      exact[i] = 1.2 * pxx + 0.8 * pyy + (qx + 2.0 * lambda * 1.2) * px +
                 (lambda * lambda * 1.2 + lambda * qx + zeta[i]) * psi[i];
    }
    const Field r = multiply(M.M, psi);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(r[i] - exact[i]));
    return err;
  };
  const double e1 = run(32), e2 = run(64);
  CHECK(e2 < 0.3 * e1);  // second order: ratio near 1/4
  CHECK(e2 < 0.2);
}

TEST_CASE("R of the logistic front for a homogeneous Fisher source") {
  const Grid g = torus1(16);
  const double a = 2.0, zeta = 3.0, lambda = 0.7;
  const auto A = DiffusionField::constant(g, Mat2::diagonal(a, 0.0));
  const auto q = AdvectionField::zero(g);
  ReactionProfile p = ReactionProfile::fisher();
  p.g = [zeta](double u) { return zeta * u * (1.0 - u); };
  p.dg0 = zeta;
  p.slope1 = -zeta;
  p.lipschitz = zeta;
  const auto f = make_homogeneous_nonlinearity(g, p);
  const PhaseBasis basis(g, 2);
  const TestFunction phi = make_exp_sigmoid(g, lambda, basis, std::vector<double>(basis.size(), 0.0));
  const CoefficientJets coef = CoefficientJets::build(g, A, q);
  for (double s : {-5.0, -1.0, 0.0, 0.3, 4.0}) {
    const double P = 1.0 / (1.0 + std::exp(-lambda * s));
    CHECK(R_value(coef, f, phi, s, 5) == doctest::Approx(a * lambda * (1.0 - 2.0 * P) + zeta / lambda).epsilon(1e-9));
  }
  const RFieldSample r = evaluate_R(g, A, q, f, phi);
  CHECK(r.sup == doctest::Approx(a * lambda + zeta / lambda).epsilon(1e-12));
  CHECK(r.inf == doctest::Approx(-a * lambda + zeta / lambda).epsilon(1e-12));
  CHECK(r.sup_where == -1);
  CHECK(r.inf_where == 1);
  CHECK(r.tails_analytic);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.tail_minus[i] == doctest::Approx(a * lambda + zeta / lambda));

  // translation in s leaves the extrema unchanged
  const RFieldSample rs = evaluate_R(g, A, q, f, phi.shifted(1.7));
  CHECK(rs.sup == doctest::Approx(r.sup).epsilon(1e-12));
  CHECK(rs.inf == doctest::Approx(r.inf).epsilon(1e-12));
}

TEST_CASE("front form of a structured test function against finite differences") {
  const Grid g = torus2(16, 16);
  const auto A = wavy_diffusion(g);
  const auto q = AdvectionField::rotated_gradient(
      g, [](const Vec2& p) { return 0.4 * std::sin(kTwoPi * p[0]) * std::sin(kTwoPi * p[1]); });
  const CoefficientJets coef = CoefficientJets::build(g, A, q);
  const PhaseBasis basis(g, 1);
  std::vector<double> c(basis.size(), 0.0);
  c[0] = 0.2;
  const TestFunction phi = make_exp_sigmoid(g, 1.1, basis, c);
  // phase jets are analytic: check the s-derivatives by differencing in s
  const double s = 0.4, ds = 1e-4;
  for (std::size_t node : {0u, 37u, 200u}) {
    const FrontJet j0 = phi.jet(s, node), jp = phi.jet(s + ds, node), jm = phi.jet(s - ds, node);
    CHECK(j0.phi_s == doctest::Approx((jp.phi - jm.phi) / (2 * ds)).epsilon(1e-6));
    CHECK(j0.phi_ss == doctest::Approx((jp.phi_s - jm.phi_s) / (2 * ds)).epsilon(1e-6));
    CHECK(j0.grad_s[0] == doctest::Approx((jp.grad[0] - jm.grad[0]) / (2 * ds)).epsilon(1e-6));
  }
}

TEST_CASE("explicit test functions: admissibility and window-only limits") {
  const Grid g = torus1(8);
  const auto A = DiffusionField::constant(g, Mat2::diagonal(1.0, 0.0));
  const auto q = AdvectionField::zero(g);
  const auto f = make_homogeneous_nonlinearity(g, ReactionProfile::fisher());
  auto logistic = [](double s, std::size_t) {
    const double P = 1.0 / (1.0 + std::exp(-s));
    FrontJet j;
    j.phi = P;
    j.phi_s = P * (1 - P);
    j.phi_ss = P * (1 - P) * (1 - 2 * P);
    return j;
  };
  const TestFunction ok = TestFunction::explicit_jets(logistic, g.size(), -30.0, 30.0, 1.0);
  const RFieldSample r = evaluate_R(g, A, q, f, ok);
  CHECK(r.limits_checked_on_window_only);
  CHECK_FALSE(r.tails_analytic);
  CHECK(r.sup == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.inf == doctest::Approx(0.0).epsilon(1e-6));

  const TestFunction bad = TestFunction::explicit_jets(
      [&](double s, std::size_t n) {
        FrontJet j = logistic(s, n);
        j.phi_s = -j.phi_s;
        return j;
      },
      g.size(), -10.0, 10.0, 1.0);
  CHECK_THROWS_AS(evaluate_R(g, A, q, f, bad), AdmissibilityError);

  // R drifting near the window edge is not a converged limit
  const TestFunction drift = TestFunction::explicit_jets(logistic, g.size(), -3.0, 3.0, 1.0);
  CHECK_THROWS_AS(evaluate_R(g, A, q, f, drift), TailError);
}
