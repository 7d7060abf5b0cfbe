#pragma once

#include <memory>

#include "pulsefront/media.hpp"
#include "pulsefront/testfunction.hpp"

namespace pulsefront {

struct PlanarFront {
  double c0 = 0.0;
  double a = 1.0;
  double mu = 0.0;  // decay rate of 1 - V at +inf
  double mismatch = 0.0;
  int bisection_steps = 0;
  std::shared_ptr<const TabulatedProfile> profile;
};

struct PlanarOptions {
  double c_tol = 1e-8;       // bisection width on c
  double start_offset = 1e-8;  // 1 - V at the start of the shooting trajectory
  double table_floor = 1e-10;  // tabulate V from about this value up to 1 - table_top
  double table_top = 1e-9;
  double step = 0.0;          // table spacing; 0 picks 0.01 min(1, a / c, 1 / mu)
};

/// Travelling front a V'' - c V' + f(V) = 0, V(-inf) = 0, V(+inf) = 1, for a
/// homogeneous combustion source. The trajectory leaving (V, V') = (1, 0) is
/// shot down to V = theta and c is bisected until V'(theta) = c theta / a,
/// which joins the exponential solution below the ignition temperature.
PlanarFront solve_planar_front(const Nonlinearity& f, double a, const PlanarOptions& opts = {});

}  // namespace pulsefront
