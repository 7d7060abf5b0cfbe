#include <doctest.h>

#include <sstream>

#include "pulsefront/bounds.hpp"
#include "pulsefront/errors.hpp"
#include "support.hpp"

using namespace support;

namespace {

struct Medium1 {
  Grid g = torus1(32);
  DiffusionField A = DiffusionField::constant(g, Mat2::diagonal(1.0, 0.0));
  AdvectionField q = AdvectionField::zero(g);
};

}  // namespace

TEST_CASE("optimized bound recovers the constant-coefficient KPP speed") {
  Medium1 m;
  const auto f = make_homogeneous_nonlinearity(m.g, ReactionProfile::fisher());
  BoundOptions o;
  o.lambda0 = 0.3;
  const BoundResult r = upper_bound_minmax(m.g, m.A, m.q, f, o);
  CHECK(r.estimate.value == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(r.estimate.route == Route::UpperBound);
  // bound history never increases
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("every admissible test function bounds the KPP speed from above") {
  for (double amp : {0.4, 0.8}) {
    Medium1 m;
    const Field h = sample(m.g, [amp](const Vec2& p) { return 1.0 + amp * std::sin(kTwoPi * p[0]); });
    const auto f = make_product_nonlinearity(m.g, h, ReactionProfile::fisher());
    const double cstar = minimal_speed_kpp(m.g, m.A, m.q, f).estimate.value;
    BoundOptions o;
    o.cut = 3;
    o.sweeps = 2;
    const BoundResult r = upper_bound_minmax(m.g, m.A, m.q, f, o);
    REQUIRE(!r.encountered.empty());
    for (const auto& [sup, inf] : r.encountered) {
      CHECK(sup >= cstar - 1e-9);
      CHECK(inf <= sup);
    }
    CHECK(r.estimate.value >= cstar);
    CHECK(r.estimate.value <= 1.03 * cstar);
  }
}

TEST_CASE("combustion speed is enclosed by every test function") {
  Medium1 m;
  const auto f = make_homogeneous_nonlinearity(m.g, ReactionProfile::ignition(0.3));
  const double c0 = 0.4953702072844;
  BoundOptions o;
  o.cut = 2;
  o.sweeps = 1;
  const BoundResult up = upper_bound_minmax(m.g, m.A, m.q, f, o);
  const BoundResult lo = lower_bound_maxmin(m.g, m.A, m.q, f, o);
  for (const auto* r : {&up, &lo})
    for (const auto& [sup, inf] : r->encountered) {
      CHECK(sup >= c0 - 1e-6);
      CHECK(inf <= c0 + 1e-6);
    }
  CHECK(lo.estimate.value <= up.estimate.value);
  CHECK(lo.estimate.route == Route::LowerBound);
}

TEST_CASE("planar-profile family reproduces the planar speed") {
  Medium1 m;
  const auto f = make_homogeneous_nonlinearity(m.g, ReactionProfile::ignition(0.3));
  const PlanarFront pf = solve_planar_front(f, 1.0);
  const PhaseBasis basis(m.g, 2);
  const TestFunction phi = make_planar_profile(m.g, pf.profile, 1.0, basis, std::vector<double>(basis.size(), 0.0));
  const RFieldSample r = evaluate_R(m.g, m.A, m.q, f, phi);
  CHECK(r.sup == doctest::Approx(pf.c0).epsilon(1e-4));
  CHECK(r.inf == doctest::Approx(pf.c0).epsilon(1e-4));
}

TEST_CASE("max-min route refuses non-combustion sources") {
  Medium1 m;
  CHECK_THROWS_AS(lower_bound_maxmin(m.g, m.A, m.q, make_homogeneous_nonlinearity(m.g, ReactionProfile::fisher())),
                  ClassError);
  CHECK_THROWS_AS(lower_bound_maxmin(m.g, m.A, m.q, make_homogeneous_nonlinearity(m.g, ReactionProfile::zfk_cubic())),
                  ClassError);
}

TEST_CASE("tail limit of the eigenfunction test function") {
  const Grid g = torus1(64);
  const auto A = DiffusionField::constant(g, Mat2::diagonal(1.0, 0.0));
  const auto q = AdvectionField::zero(g);
  const Field h = sample(g, [](const Vec2& p) { return 1.0 + 0.5 * std::sin(kTwoPi * p[0]); });
  const auto f = make_product_nonlinearity(g, h, ReactionProfile::fisher());
  KppOptions ko;
  ko.upwind = false;
  const KppSpeed ks = minimal_speed_kpp(g, A, q, f, ko);
  const OperatorMatrix M = assemble_Llambda(g, A, q, f.zeta(), ks.lambda_star, false);
  const TailCheck t = tail_limit_check(g, A, q, f, ks.pair, M, 8);
  CHECK(t.k_over_lambda == doctest::Approx(ks.estimate.value).epsilon(1e-9));
  CHECK(t.max_tail_deviation <= 2.0 * t.discrete_projection_residual + 1e-3 * t.k_over_lambda);
  CHECK(t.sup_R <= 1.02 * t.k_over_lambda);
}

TEST_CASE("bounds are deterministic for a fixed seed and log their trajectory") {
  Medium1 m;
  const Field h = sample(m.g, [](const Vec2& p) { return 1.0 + 0.5 * std::cos(kTwoPi * p[0]); });
  const auto f = make_product_nonlinearity(m.g, h, ReactionProfile::fisher());
  BoundOptions o;
  o.cut = 2;
  o.sweeps = 1;
  o.restarts = 2;
  o.seed = 42;
  std::ostringstream log;
  o.trajectory = &log;
  const BoundResult a = upper_bound_minmax(m.g, m.A, m.q, f, o);
  o.trajectory = nullptr;
  const BoundResult b = upper_bound_minmax(m.g, m.A, m.q, f, o);
  CHECK(a.estimate.value == b.estimate.value);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.evaluations == b.evaluations);
  CHECK(log.str().rfind("evaluation,bound,lambda,c1,c2,c3,c4\n", 0) == 0);
}
