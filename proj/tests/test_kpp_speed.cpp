#include <doctest.h>

#include "pulsefront/errors.hpp"
#include "pulsefront/kpp_speed.hpp"
#include "support.hpp"

using namespace support;

namespace {

Nonlinearity scaled_fisher(const Grid& g, double zeta) {
  Field h(g.size(), zeta);
  return make_product_nonlinearity(g, h, ReactionProfile::fisher());
}

}  // namespace

TEST_CASE("constant-coefficient KPP speed is 2 sqrt(a zeta)") {
  const Grid g = torus1(32);
  for (auto [a, z] : {std::pair{1.0, 1.0}, {4.0, 1.0}, {1.0, 9.0}, {0.5, 2.0}}) {
    const auto A = DiffusionField::constant(g, Mat2::diagonal(a, 0.0));
    const KppSpeed s = minimal_speed_kpp(g, A, AdvectionField::zero(g), scaled_fisher(g, z));
    CHECK(s.estimate.value == doctest::Approx(2.0 * std::sqrt(a * z)).epsilon(1e-6));
    CHECK(s.lambda_star == doctest::Approx(std::sqrt(z / a)).epsilon(1e-3));
    CHECK(s.estimate.ok());
    CHECK(s.estimate.route == Route::Eigenvalue);
  }
}

TEST_CASE("heterogeneous KPP speed lies between 2 sqrt(<zeta>) and 2 sqrt(max zeta)") {
  const Grid g = torus1(64);
  const auto A = DiffusionField::constant(g, Mat2::diagonal(1.0, 0.0));
  for (double amp : {0.3, 0.6, 0.9}) {
    const Field h = sample(g, [amp](const Vec2& p) { return 1.0 + amp * std::sin(kTwoPi * p[0]); });
    const auto f = make_product_nonlinearity(g, h, ReactionProfile::fisher());
    const KppSpeed s = minimal_speed_kpp(g, A, AdvectionField::zero(g), f);
    CHECK(s.estimate.value >= 2.0 - 1e-9);
    CHECK(s.estimate.value <= 2.0 * std::sqrt(1.0 + amp) + 1e-9);
    CHECK(s.estimate.value > 0.0);
  }
}

TEST_CASE("eigenvalue route refuses non-KPP sources") {
  const Grid g = torus1(16);
  const auto A = DiffusionField::constant(g, Mat2::diagonal(1.0, 0.0));
  CHECK_THROWS_AS(minimal_speed_kpp(g, A, AdvectionField::zero(g),
                                    make_homogeneous_nonlinearity(g, ReactionProfile::ignition(0.3))),
                  ClassError);
  CHECK_THROWS_AS(minimal_speed_kpp(g, A, AdvectionField::zero(g),
                                    make_homogeneous_nonlinearity(g, ReactionProfile::zfk_cubic())),
                  ClassError);
}

TEST_CASE("route names round-trip") {
  for (Route r : {Route::Eigenvalue, Route::UpperBound, Route::LowerBound, Route::Simulation})
    CHECK(route_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(route_from_string("gradient"), std::invalid_argument);
}

TEST_CASE("speed report flags ordering violations and gaps") {
  auto est = [](Route r, double v, double u = 0.0) {
    SpeedEstimate e;
    e.route = r;
    e.value = v;
    e.uncertainty = u;
    return e;
  };
  CHECK(speed_report({est(Route::LowerBound, 0.49), est(Route::Simulation, 0.495), est(Route::UpperBound, 0.5)})
            .consistent());
  const auto bad = speed_report({est(Route::LowerBound, 0.51), est(Route::Simulation, 0.495, 0.001),
                                 est(Route::UpperBound, 0.5)});
  CHECK_FALSE(bad.consistent());
  bool saw = false;
  for (const auto& f : bad.flags) saw = saw || f.rule == "lower<=simulation";
  CHECK(saw);
  // uncertainty absorbs a small violation
  CHECK(speed_report({est(Route::Simulation, 0.501, 0.002), est(Route::UpperBound, 0.5)}).consistent());
  const auto gap = speed_report({est(Route::Eigenvalue, 2.0), est(Route::UpperBound, 2.2)});
  REQUIRE(gap.flags.size() == 1);
  CHECK(gap.flags[0].rule == "eigenvalue~upper");
  // refused routes do not take part
  SpeedEstimate refused = est(Route::LowerBound, 9.0);
  refused.status = "refused: max-min undefined for KPP";
  CHECK(speed_report({refused, est(Route::UpperBound, 2.0)}).consistent());
  CHECK(bad.to_json()["consistent"] == false);
}
