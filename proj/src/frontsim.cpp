#include "pulsefront/frontsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "pulsefront/errors.hpp"

namespace pulsefront {

// ---------------------------------------------------------------- domain

StripDomain StripDomain::make(const Grid& cell, int periods, bool clamped) {
  const auto& dir = cell.spec().direction;
  const bool along_x = std::abs(dir[0] - 1.0) < 1e-12 && (dir.size() < 2 || std::abs(dir[1]) < 1e-12);
  if (!along_x) throw std::invalid_argument("strip: only the direction e = +e_1 is supported");
  if (periods < 20) throw std::invalid_argument("strip: at least 20 periods are required");
  if (cell.strip_periods() != 0) throw std::invalid_argument("strip: expected a cell grid");
  return StripDomain{cell, periods, Grid::strip(cell, periods), clamped};
}

std::size_t StripDomain::cell_node(std::size_t strip_node) const {
  const auto c = strip.coords(strip_node);
  return cell.index(c[0] % cell.n(0), c[1]);
}

// ---------------------------------------------------------------- simulator

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

bool is_end(const Grid& strip, std::size_t node) {
  const int i = strip.coords(node)[0];
  return i == 0 || i == strip.n(0) - 1;
}

}  // namespace

FrontSimulator::FrontSimulator(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q,
                               const Nonlinearity& f, double dt)
    : domain_(domain), dt_(dt), f_(nullptr), f_owned_(std::make_shared<const Nonlinearity>(f)) {
  f_ = f_owned_.get();
  const Grid& cell = domain_.cell;
  const Grid& strip = domain_.strip;
  if (A.A.size() != cell.size() || q.q.size() != cell.size() || f.size() != cell.size())
    throw std::invalid_argument("simulator: media must be sampled on the cell grid");
  if (!(dt > 0.0)) throw std::invalid_argument("simulator: dt must be positive");

  const std::size_t n = strip.size();
  to_cell_.resize(n);
  std::vector<Mat2> As(n);
  VectorField qs(n);
  double qmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    to_cell_[i] = domain_.cell_node(i);
    As[i] = A.A[to_cell_[i]];
    qs[i] = q.q[to_cell_[i]];
    qmax = std::max({qmax, std::abs(qs[i][0]), std::abs(qs[i][1])});
  }
  double hmin = strip.h(0);
  if (strip.dim() == 2) hmin = std::min(hmin, strip.h(1));
  if (qmax > 0.0 && dt > 0.5 * hmin / qmax) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the advective limit 0.5 h / max|q| = " << 0.5 * hmin / qmax;
    throw CFLError(os.str());
  }
  if (f.lipschitz() > 0.0 && dt > 1.0 / f.lipschitz()) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the reaction limit 1 / Lip(f) = " << 1.0 / f.lipschitz();
    throw CFLError(os.str());
  }

  const StencilSet ops(strip);
  advection_ = ops.drift(qs, true);
  const SparseMatrix D = ops.div_A_grad(As);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(D.nonZeros()) + n);
  for (Eigen::Index r = 0; r < D.outerSize(); ++r) {
    const auto row = static_cast<std::size_t>(r);
    if (domain_.clamped && is_end(strip, row)) {
      t.emplace_back(r, r, 1.0);
      continue;
    }
    t.emplace_back(r, r, 1.0);
    for (SparseMatrix::InnerIterator it(D, r); it; ++it) t.emplace_back(r, it.col(), -dt * it.value());
  }
  ColMatrix S(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  S.setFromTriplets(t.begin(), t.end());
  S.makeCompressed();
  diffusion_.compute(S);
  if (diffusion_.info() != Eigen::Success) throw std::runtime_error("simulator: diffusion factorization failed");
}

void FrontSimulator::step(SimState& st) const {
  const Grid& strip = domain_.strip;
  const std::size_t n = strip.size();
  Field& u = st.u;
  for (std::size_t i = 0; i < n; ++i) u[i] += dt_ * (*f_)(to_cell_[i], u[i]);
  if (advection_.nonZeros() > 0) {
    Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd adv = advection_ * uv;
    for (std::size_t i = 0; i < n; ++i) u[i] += dt_ * adv[static_cast<Eigen::Index>(i)];
  }
  auto clamp_ends = [&](Field& v) {
    if (!domain_.clamped) return;
    const int nx = strip.n(0);
    const int ny = strip.dim() == 2 ? strip.n(1) : 1;
    for (int j = 0; j < ny; ++j) {
      v[strip.index(0, j)] = 0.0;
      v[strip.index(nx - 1, j)] = 1.0;
    }
  };
  clamp_ends(u);
  Eigen::Map<Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(n));
  uv = diffusion_.solve(Eigen::VectorXd(uv));
  double clip = 0.0;
  for (double& v : u) {
    if (v < 0.0) {
      clip = std::max(clip, -v);
      v = 0.0;
    } else if (v > 1.0) {
      clip = std::max(clip, v - 1.0);
      v = 1.0;
    }
  }
  clamp_ends(u);
  st.last_clip = clip;
  st.clip = std::max(st.clip, clip);
  st.t += dt_;
}

Field FrontSimulator::cross_mean(const Field& u) const {
  const Grid& strip = domain_.strip;
  const int nx = strip.n(0);
  if (strip.dim() == 1) return Field(u.begin(), u.begin() + nx);
  const int ny = strip.n(1);
  const bool wall = !strip.periodic(1);
  Field m(static_cast<std::size_t>(nx), 0.0);
  double wsum = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double w = wall && (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    wsum += w;
    for (int i = 0; i < nx; ++i) m[static_cast<std::size_t>(i)] += w * u[strip.index(i, j)];
  }
  for (double& v : m) v /= wsum;
  return m;
}

double FrontSimulator::x_mass(const SimState& st) const {
  const Field m = cross_mean(st.u);
  const double h = domain_.strip.h(0);
  double integral = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) integral += (i == 0 || i + 1 == m.size() ? 0.5 : 1.0) * m[i];
  integral *= h;
  const double x_right =
      (static_cast<double>(m.size() - 1) + static_cast<double>(st.shift) * domain_.cell.n(0)) * h;
  return x_right - integral;
}

namespace {

// array position (in nodes) where the cross-mean first reaches 1/2, NaN if never
double level_index(const Field& m) {
  if (m.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (m[0] >= 0.5) return 0.0;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] >= 0.5) return static_cast<double>(i - 1) + (0.5 - m[i - 1]) / (m[i] - m[i - 1]);
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double FrontSimulator::x_level(const SimState& st) const {
  const double idx = level_index(cross_mean(st.u));
  return (idx + static_cast<double>(st.shift) * domain_.cell.n(0)) * domain_.strip.h(0);
}

TimeSample FrontSimulator::sample(const SimState& st) const {
  TimeSample s;
  s.t = st.t;
  s.x_mass = x_mass(st);
  s.x_level = x_level(st);
  const auto [lo, hi] = std::minmax_element(st.u.begin(), st.u.end());
  s.u_min = *lo;
  s.u_max = *hi;
  return s;
}

bool FrontSimulator::recentre(SimState& st) const {
  const Grid& strip = domain_.strip;
  const int nx = strip.n(0);
  const int ny = strip.dim() == 2 ? strip.n(1) : 1;
  const int n1 = domain_.cell.n(0);
  const double idx = level_index(cross_mean(st.u));
  if (!std::isfinite(idx)) return false;
  if (idx >= 0.6 * nx && idx <= 0.8 * nx) return false;
  const int k = static_cast<int>(std::lround((0.7 * nx - idx) / n1));
  if (k == 0) return false;
  Field u(st.u.size());
  const int off = k * n1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int src = i - off;
      double v;
      if (src < 0)
        v = 0.0;
      else if (src >= nx)
        v = 1.0;
      else
        v = st.u[strip.index(src, j)];
      u[strip.index(i, j)] = v;
    }
  st.u = std::move(u);
  st.shift -= k;
  return true;
}

// ---------------------------------------------------------------- runs

SimState initial_state(const StripDomain& domain, const SimOptions& opts) {
  const Grid& strip = domain.strip;
  const double h = strip.h(0);
  const double x0 = opts.x0_fraction * domain.length();
  SimState st;
  st.u.resize(strip.size());
  for (std::size_t k = 0; k < strip.size(); ++k) {
    const double x = strip.coords(k)[0] * h;
    double v;
    if (opts.initial == InitialKind::Heaviside) {
      v = opts.amplitude * std::clamp((x - x0) / (2.0 * h) + 0.5, 0.0, 1.0);
    } else {
      if (!opts.seed) throw std::invalid_argument("initial_state: planar seed needs a profile");
      double p1, p2;
      opts.seed->eval(x - x0, v, p1, p2);
    }
    st.u[k] = std::clamp(v, 0.0, 1.0);
  }
  return st;
}

SimRun run_front_simulation(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q,
                            const Nonlinearity& f, const SimOptions& opts) {
  const FrontSimulator sim(domain, A, q, f, opts.dt);
  SimState st = initial_state(domain, opts);
  const double t_end = opts.t_burn + opts.t_fit;
  const long steps = std::lround(std::ceil(t_end / opts.dt - 1e-9));
  const long sample_stride = std::max(1L, std::lround(opts.sample_every / opts.dt));
  const long snap_stride = opts.snapshot_every > 0.0 ? std::max(1L, std::lround(opts.snapshot_every / opts.dt)) : 0;

  SimRun run;
  run.series.push_back(sim.sample(st));
  for (long k = 1; k <= steps; ++k) {
    sim.step(st);
    if (opts.recentre && k % 10 == 0) sim.recentre(st);
    if (k % sample_stride == 0) run.series.push_back(sim.sample(st));
    if (snap_stride > 0 && k % snap_stride == 0 && st.t >= opts.snapshot_from - 1e-12)
      run.snapshots.push_back(Snapshot{st.t, st.shift, st.u});
  }
  run.max_clip = st.clip;

  std::vector<double> ts, xs, ls;
  for (const auto& s : run.series)
    if (s.t >= opts.t_burn - 1e-9 && s.t <= t_end + 1e-9) {
      ts.push_back(s.t);
      xs.push_back(s.x_mass);
      ls.push_back(s.x_level);
    }
  const double L = domain.cell.spec().periods[0];
  if (ts.size() < 3) throw NoFrontError("front simulation: fit window holds fewer than 3 samples");
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const double range = *xmax - *xmin;
  if (!(range >= 2.0 * L)) {
    std::ostringstream os;
    os << "front moved " << range << " over the fit window, less than two periods";
    throw NoFrontError(os.str());
  }
  const auto n = static_cast<double>(ts.size());
  double tm = 0.0, xm = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) tm += ts[i], xm += xs[i];
  tm /= n, xm /= n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    stx += (ts[i] - tm) * (xs[i] - xm);
  }
  const double slope = stx / stt;
  double rss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = xs[i] - (xm + slope * (ts[i] - tm));
    rss += r * r;
  }
  const double se = std::sqrt(rss / (n - 2.0) / stt);
  const boost::math::students_t dist(n - 2.0);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double h = domain.strip.h(0);

  double level_slope = std::numeric_limits<double>::quiet_NaN();
  {
    double lm = 0.0;
    bool finite = true;
    for (double v : ls) finite = finite && std::isfinite(v), lm += v;
    if (finite) {
      lm /= n;
      double stl = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) stl += (ts[i] - tm) * (ls[i] - lm);
      level_slope = stl / stt;
    }
  }

  SpeedEstimate& e = run.estimate;
  e.route = Route::Simulation;
  e.value = -slope;
  e.uncertainty = tq * se + h / opts.t_fit;
  e.detail = {{"slope_standard_error", se},
              {"samples", ts.size()},
              {"t_burn", opts.t_burn},
              {"t_fit", opts.t_fit},
              {"dt", opts.dt},
              {"h", h},
              {"periods", domain.periods},
              {"max_clip", run.max_clip},
              {"x_range", range},
              {"level_speed", std::isfinite(level_slope) ? -level_slope : 0.0}};
  run.final_state = std::move(st);
  return run;
}

SpeedEstimate measure_front_speed(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q,
                                  const Nonlinearity& f, const SimOptions& opts) {
  return run_front_simulation(domain, A, q, f, opts).estimate;
}

std::vector<SpeedEstimate> measure_c_theta_curve(const StripDomain& domain, const DiffusionField& A,
                                                 const AdvectionField& q, const Nonlinearity& f,
                                                 const std::vector<double>& thetas, const SimOptions& opts) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0 && thetas[i] < 0.5)) throw std::invalid_argument("c_theta curve: theta must lie in (0, 1/2)");
    if (i > 0 && !(thetas[i] < thetas[i - 1])) throw std::invalid_argument("c_theta curve: thetas must be descending");
  }
  std::vector<SpeedEstimate> out;
  for (double th : thetas) {
    const Nonlinearity ft = regularize_combustion(f, th);
    SpeedEstimate e = measure_front_speed(domain, A, q, ft, opts);
    e.detail["theta"] = th;
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------- extraction

namespace {

struct Sample {
  double s;
  double u;
};

// weighted local cubic fit at s0; returns (phi, phi_s, phi_ss). With `logit`
// the fit is done on log(u / (1 - u)), which is close to linear in both tails.
bool local_cubic(const std::vector<Sample>& data, double s0, double bw, bool logit, double out[3]) {
  auto lo = std::lower_bound(data.begin(), data.end(), s0 - bw, [](const Sample& a, double v) { return a.s < v; });
  Eigen::Matrix4d N = Eigen::Matrix4d::Zero();
  Eigen::Vector4d b = Eigen::Vector4d::Zero();
  int count = 0;
  for (auto it = lo; it != data.end() && it->s <= s0 + bw; ++it) {
    const double d = (it->s - s0) / bw;
    const double w0 = 1.0 - std::abs(d) * std::abs(d) * std::abs(d);
    const double w = w0 * w0 * w0;
    const Eigen::Vector4d phi(1.0, d, d * d, d * d * d);
    N += w * phi * phi.transpose();
    double v = it->u;
    if (logit) {
      v = std::clamp(v, 1e-14, 1.0 - 1e-14);
      v = std::log(v / (1.0 - v));
    }
    b += w * v * phi;
    ++count;
  }
  if (count < 6) return false;
  const Eigen::Vector4d beta = N.ldlt().solve(b);
  const double v0 = beta[0], v1 = beta[1] / bw, v2 = 2.0 * beta[2] / (bw * bw);
  if (!logit) {
    out[0] = v0, out[1] = v1, out[2] = v2;
    return true;
  }
  const double p = 1.0 / (1.0 + std::exp(-v0));
  const double g = p * (1.0 - p);
  out[0] = p;
  out[1] = g * v1;
  out[2] = g * (v2 + (1.0 - 2.0 * p) * v1 * v1);
  return true;
}

}  // namespace

TestFunction extract_front_testfunction(const StripDomain& domain, const std::vector<Snapshot>& snapshots, double c,
                                        const ExtractOptions& opts) {
  if (!(c > 0.0)) throw std::invalid_argument("extract_front_testfunction: speed must be positive");
  if (snapshots.empty()) throw BinningError("extract_front_testfunction: no snapshots");
  const Grid& cell = domain.cell;
  const Grid& strip = domain.strip;
  const int n1 = cell.n(0);
  const int ny = cell.dim() == 2 ? cell.n(1) : 1;
  const int nx = strip.n(0);
  const double h = cell.h(0);
  const std::size_t nc = cell.size();

  std::vector<std::vector<Sample>> data(nc);
  for (const auto& snap : snapshots) {
    if (snap.u.size() != strip.size()) throw std::invalid_argument("extract_front_testfunction: snapshot size mismatch");
    // stay clear of the clamped ends
    for (int i = 2 * n1; i < nx - 2 * n1; ++i) {
      const double x = (static_cast<double>(i) + static_cast<double>(snap.shift) * n1) * h;
      const double s = x + c * snap.t;
      for (int j = 0; j < ny; ++j) data[cell.index(i % n1, j)].push_back({s, snap.u[strip.index(i, j)]});
    }
  }
  for (auto& d : data) std::sort(d.begin(), d.end(), [](const Sample& a, const Sample& b) { return a.s < b.s; });

  double s_lo = -std::numeric_limits<double>::infinity(), s_hi = std::numeric_limits<double>::infinity();
  for (const auto& d : data) {
    double first = std::numeric_limits<double>::quiet_NaN(), last = first;
    for (const auto& p : d)
      if (p.u >= opts.phi_floor) {
        first = p.s;
        break;
      }
    for (auto it = d.rbegin(); it != d.rend(); ++it)
      if (it->u <= 1.0 - opts.phi_floor) {
        last = it->s;
        break;
      }
    if (!std::isfinite(first) || !std::isfinite(last)) throw BinningError("extract_front_testfunction: no front in data");
    s_lo = std::max(s_lo, first);
    s_hi = std::min(s_hi, last);
  }
  if (!(s_hi > s_lo)) throw BinningError("extract_front_testfunction: empty s-window");
  const double bw = opts.bandwidth > 0.0 ? opts.bandwidth : 3.0 * h;

  for (const auto& d : data) {
    auto it = std::lower_bound(d.begin(), d.end(), s_lo - bw, [](const Sample& a, double v) { return a.s < v; });
    if (it == d.end() || it->s > s_lo - bw + 2.0 * h) throw BinningError("extract_front_testfunction: window start not covered");
    for (; it + 1 != d.end() && it->s < s_hi + bw; ++it)
      if ((it + 1)->s - it->s > 2.0 * h) {
        std::ostringstream os;
        os << "s-coverage gap of " << (it + 1)->s - it->s << " at s = " << it->s;
        throw BinningError(os.str());
      }
    if (d.back().s < s_hi + bw - 2.0 * h) throw BinningError("extract_front_testfunction: window end not covered");
  }

  const int K = opts.s_points;
  const double ds = (s_hi - s_lo) / (K - 1);
  struct Table {
    std::vector<double> phi, phi_s, phi_ss;
  };
  auto tab = std::make_shared<Table>();
  tab->phi.resize(static_cast<std::size_t>(K) * nc);
  tab->phi_s.resize(tab->phi.size());
  tab->phi_ss.resize(tab->phi.size());
  for (std::size_t node = 0; node < nc; ++node)
    for (int k = 0; k < K; ++k) {
      double r[3];
      if (!local_cubic(data[node], s_lo + ds * k, bw, opts.logit_fit, r)) throw BinningError("extract_front_testfunction: sparse data");
      const std::size_t at = static_cast<std::size_t>(k) * nc + node;
      tab->phi[at] = r[0];
      tab->phi_s[at] = r[1];
      tab->phi_ss[at] = r[2];
    }

  // spatial derivatives at fixed s by centered differences on the cell
  struct Jets {
    std::vector<FrontJet> j;
  };
  auto jets = std::make_shared<Jets>();
  jets->j.resize(tab->phi.size());
  const double hy = cell.dim() == 2 ? cell.h(1) : 1.0;
  for (int k = 0; k < K; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) * nc;
    auto P = [&](const std::vector<double>& v, int i, int j) {
      const int ii = ((i % n1) + n1) % n1;
      const int jj = cell.dim() == 2 ? cell.reflect(1, j) : 0;
      return v[base + cell.index(ii, jj)];
    };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < n1; ++i) {
        FrontJet& J = jets->j[base + cell.index(i, j)];
        J.phi = P(tab->phi, i, j);
        J.phi_s = P(tab->phi_s, i, j);
        J.phi_ss = P(tab->phi_ss, i, j);
        J.grad[0] = (P(tab->phi, i + 1, j) - P(tab->phi, i - 1, j)) / (2.0 * h);
        J.grad_s[0] = (P(tab->phi_s, i + 1, j) - P(tab->phi_s, i - 1, j)) / (2.0 * h);
        J.hess.xx = (P(tab->phi, i + 1, j) - 2.0 * J.phi + P(tab->phi, i - 1, j)) / (h * h);
        if (cell.dim() == 2) {
          J.grad[1] = (P(tab->phi, i, j + 1) - P(tab->phi, i, j - 1)) / (2.0 * hy);
          J.grad_s[1] = (P(tab->phi_s, i, j + 1) - P(tab->phi_s, i, j - 1)) / (2.0 * hy);
          J.hess.yy = (P(tab->phi, i, j + 1) - 2.0 * J.phi + P(tab->phi, i, j - 1)) / (hy * hy);
          J.hess.xy = J.hess.yx = (P(tab->phi, i + 1, j + 1) - P(tab->phi, i + 1, j - 1) - P(tab->phi, i - 1, j + 1) +
                                   P(tab->phi, i - 1, j - 1)) /
                                  (4.0 * h * hy);
        }
      }
  }

  ExplicitJetFn fn = [jets, K, nc, s_lo, ds](double s, std::size_t node) {
    double x = (s - s_lo) / ds;
    x = std::clamp(x, 0.0, static_cast<double>(K - 1));
    int k = static_cast<int>(x);
    if (k >= K - 1) k = K - 2;
    const double t = x - k;
    const FrontJet& a = jets->j[static_cast<std::size_t>(k) * nc + node];
    const FrontJet& b = jets->j[static_cast<std::size_t>(k + 1) * nc + node];
    auto mix = [t](double p, double q) { return (1.0 - t) * p + t * q; };
    FrontJet r;
    r.phi = mix(a.phi, b.phi);
    r.phi_s = mix(a.phi_s, b.phi_s);
    r.phi_ss = mix(a.phi_ss, b.phi_ss);
    for (int d = 0; d < 2; ++d) {
      r.grad[d] = mix(a.grad[d], b.grad[d]);
      r.grad_s[d] = mix(a.grad_s[d], b.grad_s[d]);
    }
    r.hess = {mix(a.hess.xx, b.hess.xx), mix(a.hess.xy, b.hess.xy), mix(a.hess.yx, b.hess.yx),
              mix(a.hess.yy, b.hess.yy)};
    return r;
  };
  return TestFunction::explicit_jets(std::move(fn), nc, s_lo, s_hi, 1.0);
}

// ---------------------------------------------------------------- periodicity

namespace {

// value at global lattice index g (x) and cross index j, NaN outside the window
double value_at(const StripDomain& dom, const Snapshot& snap, std::int64_t g, int j) {
  const std::int64_t i = g - snap.shift * dom.cell.n(0);
  if (i < 0 || i >= dom.strip.n(0)) return std::numeric_limits<double>::quiet_NaN();
  return snap.u[dom.strip.index(static_cast<int>(i), j)];
}

double level_of(const StripDomain& dom, const Snapshot& snap) {
  const Grid& strip = dom.strip;
  const int nx = strip.n(0);
  const int ny = strip.dim() == 2 ? strip.n(1) : 1;
  Field m(static_cast<std::size_t>(nx), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m[static_cast<std::size_t>(i)] += snap.u[strip.index(i, j)] / ny;
  return level_index(m) + static_cast<double>(snap.shift) * dom.cell.n(0);
}

}  // namespace

PulsatingCheck pulsating_mismatch(const StripDomain& domain, const std::vector<Snapshot>& snapshots, double c,
                                  std::size_t reference) {
  if (!(c > 0.0)) throw std::invalid_argument("pulsating_mismatch: speed must be positive");
  if (reference >= snapshots.size()) throw std::invalid_argument("pulsating_mismatch: bad reference snapshot");
  const Snapshot& s0 = snapshots[reference];
  const double L = domain.cell.spec().periods[0];
  const double target = s0.t + L / c;
  std::size_t k = reference;
  while (k + 1 < snapshots.size() && snapshots[k + 1].t < target) ++k;
  if (k + 1 >= snapshots.size() || snapshots[k].t > target)
    throw std::invalid_argument("pulsating_mismatch: snapshots do not cover t + L / c");
  const Snapshot& a = snapshots[k];
  const Snapshot& b = snapshots[k + 1];
  const double w = (target - a.t) / (b.t - a.t);

  const int n1 = domain.cell.n(0);
  const int ny = domain.cell.dim() == 2 ? domain.cell.n(1) : 1;
  const double level = level_of(domain, s0);
  if (!std::isfinite(level)) throw NoFrontError("pulsating_mismatch: no front in the reference snapshot");
  const auto g_front = static_cast<std::int64_t>(std::floor(level)) - n1;
  const std::int64_t g0 = static_cast<std::int64_t>(std::floor(static_cast<double>(g_front) / n1)) * n1;

  PulsatingCheck out;
  out.t = s0.t;
  out.cell = g0;
  for (std::int64_t g = g0; g < g0 + n1; ++g)
    for (int j = 0; j < ny; ++j) {
      const double later = (1.0 - w) * value_at(domain, a, g, j) + w * value_at(domain, b, g, j);
      const double shifted = value_at(domain, s0, g + n1, j);
      const double d = std::abs(later - shifted);
      if (!std::isfinite(d)) throw std::invalid_argument("pulsating_mismatch: compared cell left the window");
      out.mismatch = std::max(out.mismatch, d);
    }
  return out;
}

// ---------------------------------------------------------------- output

void write_time_series_csv(std::ostream& os, const std::vector<TimeSample>& series) {
  os << "t,X_mass,X_level,min_u,max_u\n";
  os.precision(12);
  for (const auto& s : series) os << s.t << "," << s.x_mass << "," << s.x_level << "," << s.u_min << "," << s.u_max << "\n";
}

void write_snapshot_csv(std::ostream& os, const StripDomain& domain, const Snapshot& snap) {
  const Grid& strip = domain.strip;
  const int ny = strip.dim() == 2 ? strip.n(1) : 1;
  const double hy = strip.dim() == 2 ? strip.h(1) : 0.0;
  os << "# nx=" << strip.n(0) << " ny=" << ny << " hx=" << strip.h(0) << " hy=" << hy << " t=" << snap.t
     << " shift=" << snap.shift << "\n";
  os << "i,j,x,y,u\n";
  os.precision(12);
  for (std::size_t k = 0; k < strip.size(); ++k) {
    const auto c = strip.coords(k);
    const double x = (c[0] + static_cast<double>(snap.shift) * domain.cell.n(0)) * strip.h(0);
    os << c[0] << "," << c[1] << "," << x << "," << c[1] * hy << "," << snap.u[k] << "\n";
  }
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("snapshot: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'P', 'F', 'S', 'N', 'A', 'P', '0', '1'};

}  // namespace

void write_snapshot_binary(std::ostream& os, const StripDomain& domain, const Snapshot& snap) {
  const Grid& strip = domain.strip;
  os.write(kMagic, 8);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(strip.n(0)));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(strip.dim() == 2 ? strip.n(1) : 1));
  put<double>(os, strip.h(0));
  put<double>(os, strip.dim() == 2 ? strip.h(1) : 0.0);
  put<double>(os, snap.t);
  put<std::int64_t>(os, snap.shift);
  for (double v : snap.u) put<double>(os, v);
}

Snapshot read_snapshot_binary(std::istream& is, std::uint32_t& nx, std::uint32_t& ny) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("snapshot: bad magic");
  nx = get<std::uint32_t>(is);
  ny = get<std::uint32_t>(is);
  get<double>(is);
  get<double>(is);
  Snapshot s;
  s.t = get<double>(is);
  s.shift = get<std::int64_t>(is);
  s.u.resize(static_cast<std::size_t>(nx) * ny);
  for (double& v : s.u) v = get<double>(is);
  return s;
}

}  // namespace pulsefront
