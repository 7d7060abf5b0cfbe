#include "pulsefront/planar_front.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace odeint = boost::numeric::odeint;

namespace {

using State1 = std::array<double, 1>;
using State2 = std::array<double, 2>;

double tail_rate(double c, double a, double beta) { return (-c + std::sqrt(c * c + 4.0 * a * beta)) / (2.0 * a); }

// p(theta) - c theta / a along the branch of p(V) leaving V = 1; negative
// when p collapses before reaching theta.
double mismatch(const std::function<double(double)>& g, double a, double beta, double theta, double c, double eps) {
  const double mu = tail_rate(c, a, beta);
  State1 x{mu * eps};
  auto rhs = [&](const State1& p, State1& dp, double v) { dp[0] = (c * p[0] - g(v)) / (a * p[0]); };
  auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State1>());
  stepper.initialize(x, 1.0 - eps, -1e-3 * eps);
  while (stepper.current_time() > theta) {
    stepper.do_step(rhs);
    const double p = stepper.current_state()[0];
    if (!(p > 1e-13) || !std::isfinite(p)) return -1.0;
  }
  State1 at{};
  stepper.calc_state(theta, at);
  return at[0] - c * theta / a;
}

}  // namespace

PlanarFront solve_planar_front(const Nonlinearity& f, double a, const PlanarOptions& opts) {
  if (!(a > 0.0)) throw std::invalid_argument("solve_planar_front: a must be positive");
  if (!f.homogeneous()) throw ClassError("solve_planar_front: source must be homogeneous");
  if (f.cls() != NonlinearityClass::Combustion || !(f.theta() > 0.0))
    throw ClassError("solve_planar_front: source must be of combustion type");
  const double theta = f.theta();
  const double beta = -f.slope_at_one()[0];
  if (!(beta > 0.0)) throw ShootingError("solve_planar_front: source must decrease strictly at u = 1");
  const std::function<double(double)> g = [&f](double u) { return f(0, u); };

  double lo = 0.0, hi = 10.0 * 2.0 * std::sqrt(a * f.lipschitz());
  const double eps = opts.start_offset;
  if (!(mismatch(g, a, beta, theta, lo, eps) > 0.0) || !(mismatch(g, a, beta, theta, hi, eps) < 0.0))
    throw ShootingError("solve_planar_front: shooting bracket does not change sign");
  int steps = 0;
  while (hi - lo > opts.c_tol) {
    const double mid = 0.5 * (lo + hi);
    (mismatch(g, a, beta, theta, mid, eps) > 0.0 ? lo : hi) = mid;
    ++steps;
  }
  const double c = 0.5 * (lo + hi);
  const double mu = tail_rate(c, a, beta);

  // tabulate on a uniform lattice, integrating backwards from near V = 1
  const double h = opts.step > 0.0 ? opts.step : 0.01 * std::min({1.0, a / c, 1.0 / mu});
  const double w0 = opts.table_top;
  State2 y{1.0 - w0, mu * w0};
  auto rhs = [&](const State2& s, State2& ds, double) {
    ds[0] = s[1];
    ds[1] = (c * s[1] - g(s[0])) / a;
  };
  std::vector<double> V{y[0]}, P{y[1]};
  auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State2>());
  stepper.initialize(y, 0.0, -h);
  double xi = 0.0;
  const int max_nodes = 2000000;
  while (V.back() > theta) {
    xi -= h;
    while (stepper.current_time() > xi) stepper.do_step(rhs);
    State2 s{};
    stepper.calc_state(xi, s);
    if (!std::isfinite(s[0]) || static_cast<int>(V.size()) > max_nodes)
      throw ShootingError("solve_planar_front: tabulation diverged");
    V.push_back(s[0]);
    P.push_back(s[1]);
  }
  // locate V = theta between the last two samples by bisection on the dense output
  double xa = xi, xb = xi + h;
  for (int it = 0; it < 60; ++it) {
    const double xm = 0.5 * (xa + xb);
    State2 s{};
    stepper.calc_state(xm, s);
    (s[0] > theta ? xb : xa) = xm;
  }
  const double xi_theta = 0.5 * (xa + xb);
  V.pop_back();
  P.pop_back();
  // analytic continuation below theta
  double x = -h * static_cast<double>(V.size());
  while (true) {
    const double v = theta * std::exp(c * (x - xi_theta) / a);
    V.push_back(v);
    P.push_back(c * v / a);
    if (v < opts.table_floor) break;
    x -= h;
  }
  const std::size_t n = V.size();
  std::vector<double> v(n), v1(n), v2(n);
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = V[n - 1 - j];
    v1[j] = P[n - 1 - j];
    v2[j] = v[j] < theta ? (c / a) * v1[j] : (c * v1[j] - g(v[j])) / a;
  }
  double z0 = -h * static_cast<double>(n - 1);
  // centre V = 1/2 at z = 0
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (v[j] <= 0.5 && v[j + 1] > 0.5) {
      const double t = (0.5 - v[j]) / (v[j + 1] - v[j]);
      z0 = -h * (static_cast<double>(j) + t);
      break;
    }

  PlanarFront out;
  out.c0 = c;
  out.a = a;
  out.mu = mu;
  out.bisection_steps = steps;
  out.mismatch = mismatch(g, a, beta, theta, c, eps);
  out.profile = std::make_shared<TabulatedProfile>(z0, h, std::move(v), std::move(v1), std::move(v2), c / a, mu);
  return out;
}

}  // namespace pulsefront
