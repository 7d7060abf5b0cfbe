#include "pulsefront/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pulsefront {

namespace {

constexpr double kPi = std::numbers::pi;

// Worst jump across the periodic seam relative to interior jumps; large
// ratios flag fields that were sampled from a non-periodic function.
double seam_excess(const Grid& grid, const std::function<double(std::size_t)>& g) {
  double excess = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    if (!grid.periodic(a)) continue;
    const int na = grid.n(a);
    const int nb = grid.dim() == 2 ? grid.n(1 - a) : 1;
    for (int k = 0; k < nb; ++k) {
      auto node = [&](int i) { return a == 0 ? grid.index(i, k) : grid.index(k, i); };
      double interior = 0.0, scale = 0.0;
      for (int i = 0; i + 1 < na; ++i) {
        interior = std::max(interior, std::abs(g(node(i + 1)) - g(node(i))));
        scale = std::max(scale, std::abs(g(node(i))));
      }
      const double seam = std::abs(g(node(0)) - g(node(na - 1)));
      excess = std::max(excess, seam - 3.0 * interior - 1e-12 * (1.0 + scale));
    }
  }
  return std::max(0.0, excess);
}

Clause clause(std::string name, bool ok, double residual, std::string detail = {}) {
  return Clause{std::move(name), ok, residual, std::move(detail)};
}

Field constant_field(std::size_t n, double v) { return Field(n, v); }

}  // namespace

// ---------------------------------------------------------------- diffusion

DiffusionField DiffusionField::constant(const Grid& grid, const Mat2& value) {
  return from_samples(std::vector<Mat2>(grid.size(), value));
}

DiffusionField DiffusionField::from_function(const Grid& grid, const std::function<Mat2(const Vec2&)>& fn) {
  std::vector<Mat2> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = fn(grid.point(i));
  if (grid.dim() == 1)
    for (auto& m : s) m = Mat2{m.xx, 0.0, 0.0, 0.0};
  return from_samples(std::move(s));
}

DiffusionField DiffusionField::from_samples(std::vector<Mat2> samples) {
  DiffusionField d;
  d.A = std::move(samples);
  d.update_bounds();
  return d;
}

void DiffusionField::update_bounds() {
  alpha1 = std::numeric_limits<double>::infinity();
  alpha2 = -std::numeric_limits<double>::infinity();
  for (const Mat2& m : A) {
    const bool one_d = m.xy == 0.0 && m.yx == 0.0 && m.yy == 0.0;
    if (one_d) {
      alpha1 = std::min(alpha1, m.xx);
      alpha2 = std::max(alpha2, m.xx);
      continue;
    }
    for (int k = 0; k < 16; ++k) {
      const double t = 2.0 * kPi * k / 16.0;
      const double v = m.quadratic({std::cos(t), std::sin(t)});
      alpha1 = std::min(alpha1, v);
      alpha2 = std::max(alpha2, v);
    }
  }
  if (A.empty()) alpha1 = alpha2 = 0.0;
}

// ---------------------------------------------------------------- advection

AdvectionField AdvectionField::zero(const Grid& grid) {
  AdvectionField f;
  f.q.assign(grid.size(), Vec2{0.0, 0.0});
  f.kind = AdvectionKind::Zero;
  return f;
}

AdvectionField AdvectionField::rotated_gradient(const Grid& grid, const std::function<double(const Vec2&)>& stream) {
  if (grid.dim() != 2 || !grid.periodic(0) || !grid.periodic(1))
    throw std::invalid_argument("rotated_gradient: requires a 2-D torus cell");
  const StencilSet ops(grid);
  Eigen::VectorXd H(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) H[static_cast<Eigen::Index>(i)] = stream(grid.point(i));
  Eigen::VectorXd hx = ops.derivative(0) * H;
  Eigen::VectorXd hy = ops.derivative(1) * H;
  AdvectionField f;
  f.kind = AdvectionKind::RotatedGradient;
  f.q.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    f.q[i] = {-hy[k], hx[k]};
  }
  return f;
}

AdvectionField AdvectionField::shear(const Grid& grid, const std::function<double(double)>& profile) {
  if (grid.dim() != 2) throw std::invalid_argument("shear: requires a 2-D cell");
  AdvectionField f;
  f.kind = AdvectionKind::Shear;
  f.q.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f.q[i] = {profile(grid.point(i)[1]), 0.0};
  return f;
}

AdvectionField AdvectionField::explicit_field(const Grid& grid, const std::function<Vec2(const Vec2&)>& fn) {
  AdvectionField f;
  f.kind = AdvectionKind::Explicit;
  f.q.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f.q[i] = fn(grid.point(i));
    if (grid.dim() == 1) f.q[i][1] = 0.0;
  }
  return f;
}

AdvectionField AdvectionField::from_samples(VectorField samples) {
  AdvectionField f;
  f.kind = AdvectionKind::Explicit;
  f.q = std::move(samples);
  return f;
}

// ---------------------------------------------------------------- reaction

std::string to_string(NonlinearityClass c) {
  switch (c) {
    case NonlinearityClass::Combustion: return "combustion";
    case NonlinearityClass::ZFK: return "zfk";
    case NonlinearityClass::KPP: return "kpp";
  }
  return "unknown";
}

NonlinearityClass class_from_string(const std::string& s) {
  if (s == "combustion") return NonlinearityClass::Combustion;
  if (s == "zfk") return NonlinearityClass::ZFK;
  if (s == "kpp") return NonlinearityClass::KPP;
  throw std::invalid_argument("unknown nonlinearity class '" + s + "'");
}

ReactionProfile ReactionProfile::fisher() {
  ReactionProfile p;
  p.name = "fisher";
  p.g = [](double u) { return u * (1.0 - u); };
  p.dg0 = 1.0;
  p.slope1 = -1.0;
  p.rho = 0.5;
  p.lipschitz = 1.0;
  p.cls = NonlinearityClass::KPP;
  return p;
}

ReactionProfile ReactionProfile::ignition(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("ignition: theta must lie in (0, 1)");
  ReactionProfile p;
  p.name = "ignition";
  p.g = [theta](double u) { return std::max(0.0, u - theta) * (1.0 - u); };
  p.dg0 = 0.0;
  p.slope1 = -(1.0 - theta);
  p.theta = theta;
  p.rho = 0.5 * (1.0 - theta);
  p.lipschitz = 1.0 - theta;
  p.cls = NonlinearityClass::Combustion;
  return p;
}

ReactionProfile ReactionProfile::zfk_cubic() {
  ReactionProfile p;
  p.name = "zfk_cubic";
  p.g = [](double u) { return u * u * (1.0 - u); };
  p.dg0 = 0.0;
  p.slope1 = -1.0;
  p.rho = 1.0 / 3.0;
  p.lipschitz = 1.0;
  p.cls = NonlinearityClass::ZFK;
  return p;
}

Nonlinearity Nonlinearity::make(Fn fn, NonlinearityClass cls, NonlinearityForm form, double theta, double rho,
                                Field zeta, Field slope1, double lipschitz, std::string description) {
  Nonlinearity n;
  n.fn_ = std::move(fn);
  n.cls_ = cls;
  n.form_ = form;
  n.theta_ = theta;
  n.rho_ = rho;
  n.zeta_ = std::move(zeta);
  n.slope1_ = std::move(slope1);
  n.lipschitz_ = lipschitz;
  n.description_ = std::move(description);
  return n;
}

double Nonlinearity::min_zeta() const {
  return zeta_.empty() ? 0.0 : *std::min_element(zeta_.begin(), zeta_.end());
}

double Nonlinearity::max_zeta() const {
  return zeta_.empty() ? 0.0 : *std::max_element(zeta_.begin(), zeta_.end());
}

Nonlinearity make_homogeneous_nonlinearity(const Grid& grid, const ReactionProfile& g) {
  return make_homogeneous_nonlinearity(grid, g, g.cls);
}

Nonlinearity make_homogeneous_nonlinearity(const Grid& grid, const ReactionProfile& g, NonlinearityClass claimed) {
  auto gf = g.g;
  return Nonlinearity::make([gf](std::size_t, double u) { return gf(u); }, claimed, NonlinearityForm::Homogeneous,
                            g.theta, g.rho, constant_field(grid.size(), g.dg0),
                            constant_field(grid.size(), g.slope1), g.lipschitz, g.name);
}

Nonlinearity make_product_nonlinearity(const Grid& grid, const Field& h, const ReactionProfile& g) {
  return make_product_nonlinearity(grid, h, g, g.cls);
}

Nonlinearity make_product_nonlinearity(const Grid& grid, const Field& h, const ReactionProfile& g,
                                       NonlinearityClass claimed) {
  if (h.size() != grid.size()) throw std::invalid_argument("product nonlinearity: h has wrong size");
  double hmax = 0.0;
  for (double v : h) {
    if (!(v > 0.0)) throw std::invalid_argument("product nonlinearity: h must be positive at every node");
    hmax = std::max(hmax, v);
  }
  Field zeta(h.size()), slope1(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    zeta[i] = h[i] * g.dg0;
    slope1[i] = h[i] * g.slope1;
  }
  auto gf = g.g;
  auto hv = std::make_shared<const Field>(h);
  return Nonlinearity::make([gf, hv](std::size_t node, double u) { return (*hv)[node] * gf(u); }, claimed,
                            NonlinearityForm::Product, g.theta, g.rho, std::move(zeta), std::move(slope1),
                            hmax * g.lipschitz, "h*" + g.name);
}

Nonlinearity make_explicit_nonlinearity(const Grid& grid, Nonlinearity::Fn fn, NonlinearityClass cls, double theta,
                                        double rho) {
  constexpr double eps = 1e-6;
  const std::size_t n = grid.size();
  Field zeta(n), slope1(n);
  double lip = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zeta[i] = fn(i, eps) / eps;
    slope1[i] = -fn(i, 1.0 - eps) / eps;
    double prev = 0.0;
    for (int k = 1; k <= 256; ++k) {
      const double u = k / 256.0;
      const double v = k == 256 ? 0.0 : fn(i, u);
      lip = std::max(lip, std::abs(v - prev) * 256.0);
      prev = v;
    }
  }
  return Nonlinearity::make(std::move(fn), cls, NonlinearityForm::Explicit, theta, rho, std::move(zeta),
                            std::move(slope1), 1.1 * lip, "explicit");
}

double cutoff(double u, double theta) {
  const double v = u / theta;
  if (v <= 1.0) return 0.0;
  if (v >= 2.0) return 1.0;
  const double r = v - 1.0;
  return r * r * (3.0 - 2.0 * r);
}

Nonlinearity regularize_combustion(const Nonlinearity& f, double theta) {
  if (f.cls() == NonlinearityClass::Combustion)
    throw std::invalid_argument("regularize_combustion: source is already of combustion type");
  if (!(theta > 0.0 && theta < 0.5)) throw std::invalid_argument("regularize_combustion: theta must lie in (0, 1/2)");
  double fmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int k = 0; k <= 64; ++k) fmax = std::max(fmax, f(i, theta * (1.0 + k / 64.0)));
  const double lip = f.lipschitz() + fmax * 1.5 / theta;
  const Field zeros(f.size(), 0.0);
  auto base = std::make_shared<const Nonlinearity>(f);
  std::ostringstream desc;
  desc << f.describe() << "*cutoff(" << theta << ")";
  return Nonlinearity::make([base, theta](std::size_t node, double u) { return (*base)(node, u) * cutoff(u, theta); },
                            NonlinearityClass::Combustion, f.form(), theta, std::min(f.rho(), 1.0 - 2.0 * theta),
                            zeros, f.slope_at_one(), lip, desc.str());
}

// ---------------------------------------------------------------- validation

bool ValidationReport::passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.passed; });
}

const Clause* ValidationReport::find(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> ValidationReport::failed() const {
  std::vector<std::string> out;
  for (const auto& c : clauses)
    if (!c.passed) out.push_back(c.name);
  return out;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "class: " << to_string(cls) << "\n";
  for (const auto& c : clauses) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << "  residual=" << c.residual;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  }
  os << (passed() ? "overall: PASS" : "overall: FAIL") << "\n";
  return os.str();
}

ValidationReport validate_media(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                                const Nonlinearity& f, const ValidationOptions& opts) {
  ValidationReport rep;
  rep.cls = f.cls();
  const std::size_t n = grid.size();
  const int d = grid.spec().dim_periodic;
  const bool cylinder = grid.spec().geometry == Geometry::Cylinder;

  if (A.A.size() != n || q.q.size() != n || f.size() != n)
    throw std::invalid_argument("validate_media: fields are not sampled on this grid");

  // diffusion
  double asym = 0.0;
  for (const auto& m : A.A) asym = std::max(asym, std::abs(m.xy - m.yx));
  rep.clauses.push_back(clause("diffusion_symmetry", asym <= opts.symmetry_tol, asym));
  rep.clauses.push_back(clause("diffusion_ellipticity", A.alpha1 > 0.0 && A.alpha1 <= A.alpha2, A.alpha1,
                               "alpha1=" + std::to_string(A.alpha1) + " alpha2=" + std::to_string(A.alpha2)));
  double a_seam = 0.0;
  a_seam = std::max(a_seam, seam_excess(grid, [&](std::size_t i) { return A.A[i].xx; }));
  a_seam = std::max(a_seam, seam_excess(grid, [&](std::size_t i) { return A.A[i].xy; }));
  a_seam = std::max(a_seam, seam_excess(grid, [&](std::size_t i) { return A.A[i].yy; }));
  rep.clauses.push_back(clause("diffusion_periodicity", a_seam == 0.0, a_seam));

  // advection
  const StencilSet ops(grid);
  const Field div = ops.divergence(q.q);
  double maxdiv = 0.0;
  for (double v : div) maxdiv = std::max(maxdiv, std::abs(v));
  const double div_tol = q.kind == AdvectionKind::Explicit ? 1e-6 : 1e-10;
  rep.clauses.push_back(clause("advection_divergence", maxdiv <= div_tol, maxdiv));

  double worst_mean = 0.0;
  for (int c = 0; c < d; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += grid.weight(i) * q.q[i][c];
    worst_mean = std::max(worst_mean, std::abs(s / grid.measure()));
  }
  rep.clauses.push_back(clause("advection_mean_zero", worst_mean <= opts.mean_tol, worst_mean));

  double q_seam = 0.0;
  for (int c = 0; c < grid.dim(); ++c) q_seam = std::max(q_seam, seam_excess(grid, [&](std::size_t i) { return q.q[i][c]; }));
  rep.clauses.push_back(clause("advection_periodicity", q_seam == 0.0, q_seam));

  if (cylinder) {
    double normal = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!grid.on_wall(i)) continue;
      normal = std::max(normal, std::abs(q.q[i][1]));
      cross = std::max(cross, std::abs(A.A[i].xy));
    }
    rep.clauses.push_back(clause("advection_wall_tangency", normal <= 1e-12, normal));
    rep.clauses.push_back(clause("diffusion_wall_diagonal", cross <= 1e-12, cross));
  }

  // reaction: vanishing states and periodicity
  double edge = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    edge = std::max({edge, std::abs(f(i, 1e-9)), std::abs(f(i, 1.0 - 1e-9))});
  rep.clauses.push_back(clause("reaction_vanishes_at_states", edge <= 1e-6, edge));

  const double f_seam = std::max(seam_excess(grid, [&](std::size_t i) { return f(i, 0.5); }),
                                 seam_excess(grid, [&](std::size_t i) { return f.zeta()[i]; }));
  rep.clauses.push_back(clause("reaction_periodicity", f_seam == 0.0, f_seam));

  const int m = opts.s_points;
  double increase = 0.0;
  if (f.rho() > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      double prev = f(i, 1.0 - f.rho());
      for (int k = 1; k < m; ++k) {
        const double s = 1.0 - f.rho() + f.rho() * k / (m - 1.0);
        const double v = f(i, s);
        increase = std::max(increase, v - prev);
        prev = v;
      }
    }
  }
  rep.clauses.push_back(clause("monotone_tail", f.rho() > 0.0 && increase <= 1e-12, increase,
                               "rho=" + std::to_string(f.rho())));

  auto lattice = [m](int k) { return static_cast<double>(k) / (m + 1.0); };

  switch (f.cls()) {
    case NonlinearityClass::Combustion: {
      const double th = f.theta();
      double below = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k <= m; ++k) below = std::max(below, std::abs(f(i, th * k / m)));
      rep.clauses.push_back(clause("ignition_zero_below_theta", th > 0.0 && below == 0.0, below));
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= m; ++k) {
        const double s = th + (1.0 - th) * lattice(k);
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, f(i, s));
        worst = std::min(worst, best);
      }
      rep.clauses.push_back(clause("ignition_positive_above_theta", worst > 0.0, worst));
      break;
    }
    case NonlinearityClass::ZFK: {
      double worst = std::numeric_limits<double>::infinity();
      for (int k = 1; k <= m; ++k) {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, f(i, lattice(k)));
        worst = std::min(worst, best);
      }
      rep.clauses.push_back(clause("zfk_positive", worst > 0.0, worst));
      break;
    }
    case NonlinearityClass::KPP: {
      double margin = std::numeric_limits<double>::infinity();
      double fmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        for (int k = 1; k <= m; ++k) {
          const double s = lattice(k);
          const double v = f(i, s);
          fmin = std::min(fmin, v);
          margin = std::min(margin, f.zeta()[i] * s - v);
        }
      rep.clauses.push_back(clause("kpp_inequality", fmin > 0.0 && margin >= -1e-12, margin,
                                   "min f=" + std::to_string(fmin)));
      rep.clauses.push_back(clause("kpp_nondegeneracy", f.min_zeta() > 0.0, f.min_zeta()));
      break;
    }
  }
  return rep;
}

}  // namespace pulsefront
