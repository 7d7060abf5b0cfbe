#include "pulsefront/testfunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pulsefront {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void LogisticProfile::eval(double z, double& p, double& p1, double& p2) const {
  double q;  // 1 - p, computed without cancellation
  if (z >= 0.0) {
    const double e = std::exp(-z);
    p = 1.0 / (1.0 + e);
    q = e / (1.0 + e);
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
    q = 1.0 / (1.0 + e);
  }
  p1 = p * q;
  p2 = p1 * (q - p);
}

TabulatedProfile::TabulatedProfile(double z0, double h, std::vector<double> v, std::vector<double> v1,
                                   std::vector<double> v2, double nu_left, double nu_right)
    : z0_(z0), h_(h), v_(std::move(v)), v1_(std::move(v1)), v2_(std::move(v2)), nu_left_(nu_left), nu_right_(nu_right) {
  if (v_.size() < 4 || v1_.size() != v_.size() || v2_.size() != v_.size())
    throw std::invalid_argument("tabulated profile: inconsistent tables");
  if (!(h_ > 0.0) || !(nu_left_ > 0.0) || !(nu_right_ > 0.0))
    throw std::invalid_argument("tabulated profile: spacing and tail rates must be positive");
  const double eps = 1e-6;
  const double z_end = z0_ + h_ * static_cast<double>(v_.size() - 1);
  double lo = z0_ + std::log(eps / v_.front()) / nu_left_;
  double hi = z_end + std::log((1.0 - v_.back()) / eps) / nu_right_;
  if (v_.front() < eps)
    for (std::size_t j = 0; j < v_.size(); ++j)
      if (v_[j] >= eps) {
        lo = z0_ + h_ * static_cast<double>(j);
        break;
      }
  for (std::size_t j = 0; j < v_.size(); ++j)
    if (1.0 - v_[j] <= eps) {
      hi = z0_ + h_ * static_cast<double>(j);
      break;
    }
  window_ = {lo, hi};
  ratio_bound_ = std::max(nu_left_, nu_right_);
  for (std::size_t j = 0; j < v_.size(); ++j)
    if (v1_[j] > 0.0) ratio_bound_ = std::max(ratio_bound_, std::abs(v2_[j]) / v1_[j]);
}

void TabulatedProfile::eval(double z, double& p, double& p1, double& p2) const {
  const std::size_t n = v_.size();
  const double z_end = z0_ + h_ * static_cast<double>(n - 1);
  if (z <= z0_) {
    p = v_.front() * std::exp(nu_left_ * (z - z0_));
    p1 = nu_left_ * p;
    p2 = nu_left_ * p1;
    return;
  }
  if (z >= z_end) {
    const double w = (1.0 - v_.back()) * std::exp(-nu_right_ * (z - z_end));
    p = 1.0 - w;
    p1 = nu_right_ * w;
    p2 = -nu_right_ * p1;
    return;
  }
  std::size_t j = static_cast<std::size_t>((z - z0_) / h_);
  if (j >= n - 1) j = n - 2;
  const double t = (z - z0_) / h_ - static_cast<double>(j);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1, d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  p = h00 * v_[j] + h10 * h_ * v1_[j] + h01 * v_[j + 1] + h11 * h_ * v1_[j + 1];
  p1 = h00 * v1_[j] + h10 * h_ * v2_[j] + h01 * v1_[j + 1] + h11 * h_ * v2_[j + 1];
  p2 = (d00 * v1_[j] + d01 * v1_[j + 1]) / h_ + d10 * v2_[j] + d11 * v2_[j + 1];
}

// ---------------------------------------------------------------- phase basis

PhaseBasis::PhaseBasis(const Grid& grid, int cut) : cut_(std::max(0, cut)), dim_(grid.dim()) {
  geometry_ = grid.spec().geometry;
  lengths_[0] = grid.spec().periods[0];
  if (dim_ == 2) lengths_[1] = geometry_ == Geometry::Torus ? grid.spec().periods[1] : grid.spec().cylinder_height;

  const int kx_max = std::min(cut_, (grid.n(0) - 1) / 2);
  if (dim_ == 1) {
    for (int k = 1; k <= kx_max; ++k) {
      modes_.push_back({k, 0, false});
      modes_.push_back({k, 0, true});
    }
    return;
  }
  if (geometry_ == Geometry::Torus) {
    const int ky_max = std::min(cut_, (grid.n(1) - 1) / 2);
    for (int kx = 0; kx <= kx_max; ++kx)
      for (int ky = -ky_max; ky <= ky_max; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        modes_.push_back({kx, ky, false});
        modes_.push_back({kx, ky, true});
      }
  } else {
    const int m_max = std::min(cut_, grid.n(1) - 2);
    for (int kx = 0; kx <= kx_max; ++kx)
      for (int m = 0; m <= m_max; ++m) {
        if (kx == 0 && m == 0) continue;
        modes_.push_back({kx, m, false});
        if (kx > 0) modes_.push_back({kx, m, true});
      }
  }
}

int PhaseBasis::find(const PhaseMode& m) const {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    if (modes_[i].kx == m.kx && modes_[i].ky == m.ky && modes_[i].sine == m.sine) return static_cast<int>(i);
  return -1;
}

void PhaseBasis::eval(std::size_t mode, const Vec2& x, double& v, Vec2& g, Mat2& h) const {
  const PhaseMode& m = modes_[mode];
  if (dim_ == 1 || geometry_ == Geometry::Torus) {
    const Vec2 kappa{kTwoPi * m.kx / lengths_[0], dim_ == 2 ? kTwoPi * m.ky / lengths_[1] : 0.0};
    const double arg = kappa[0] * x[0] + kappa[1] * x[1];
    const double c = std::cos(arg), s = std::sin(arg);
    const double val = m.sine ? s : c;
    const double der = m.sine ? c : -s;
    v = val;
    g = {der * kappa[0], der * kappa[1]};
    h = {-val * kappa[0] * kappa[0], -val * kappa[0] * kappa[1], -val * kappa[1] * kappa[0], -val * kappa[1] * kappa[1]};
    return;
  }
  const double kx = kTwoPi * m.kx / lengths_[0];
  const double mu = std::numbers::pi * m.ky / lengths_[1];
  const double c = std::cos(kx * x[0]), s = std::sin(kx * x[0]);
  const double X = m.sine ? s : c;
  const double X1 = (m.sine ? c : -s) * kx;
  const double X2 = -X * kx * kx;
  const double Y = std::cos(mu * x[1]);
  const double Y1 = -mu * std::sin(mu * x[1]);
  const double Y2 = -mu * mu * Y;
  v = X * Y;
  g = {X1 * Y, X * Y1};
  h = {X2 * Y, X1 * Y1, X1 * Y1, X * Y2};
}

SpatialPhase SpatialPhase::zero(std::size_t nodes) {
  SpatialPhase p;
  p.value.assign(nodes, 0.0);
  p.grad.assign(nodes, Vec2{0.0, 0.0});
  p.hess.assign(nodes, Mat2{});
  return p;
}

SpatialPhase SpatialPhase::build(const Grid& grid, const PhaseBasis& basis, const std::vector<double>& coeffs) {
  if (coeffs.size() != basis.size()) throw std::invalid_argument("phase: coefficient count does not match basis");
  SpatialPhase p = zero(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 x = grid.point(i);
    for (std::size_t m = 0; m < basis.size(); ++m) {
      if (coeffs[m] == 0.0) continue;
      double v;
      Vec2 g;
      Mat2 h;
      basis.eval(m, x, v, g, h);
      const double c = coeffs[m];
      p.value[i] += c * v;
      p.grad[i][0] += c * g[0];
      p.grad[i][1] += c * g[1];
      p.hess[i].xx += c * h.xx;
      p.hess[i].xy += c * h.xy;
      p.hess[i].yx += c * h.yx;
      p.hess[i].yy += c * h.yy;
    }
  }
  return p;
}

double SpatialPhase::min() const { return value.empty() ? 0.0 : *std::min_element(value.begin(), value.end()); }
double SpatialPhase::max() const { return value.empty() ? 0.0 : *std::max_element(value.begin(), value.end()); }

std::vector<double> project_onto(const Grid& grid, const PhaseBasis& basis, const Field& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("projection: field size mismatch");
  std::vector<double> c(basis.size(), 0.0);
  for (std::size_t m = 0; m < basis.size(); ++m) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double v;
      Vec2 g;
      Mat2 h;
      basis.eval(m, grid.point(i), v, g, h);
      num += grid.weight(i) * v * values[i];
      den += grid.weight(i) * v * v;
    }
    c[m] = den > 0.0 ? num / den : 0.0;
  }
  return c;
}

std::vector<double> embed_coefficients(const PhaseBasis& from, const std::vector<double>& coeffs,
                                       const PhaseBasis& to) {
  std::vector<double> out(to.size(), 0.0);
  for (std::size_t m = 0; m < from.size(); ++m) {
    const int j = to.find(from.modes()[m]);
    if (j >= 0) out[static_cast<std::size_t>(j)] = coeffs[m];
  }
  return out;
}

// ---------------------------------------------------------------- test functions

std::string to_string(Family f) {
  switch (f) {
    case Family::ExpSigmoid: return "exp_sigmoid";
    case Family::PlanarProfile: return "planar_profile";
    case Family::Explicit: return "explicit";
  }
  return "unknown";
}

TestFunction TestFunction::structured(Family family, std::shared_ptr<const Profile> profile, double lambda,
                                      SpatialPhase phase, double tau) {
  if (family == Family::Explicit) throw std::invalid_argument("structured test function cannot be explicit");
  if (!(lambda > 0.0)) throw std::invalid_argument("test function: lambda must be positive");
  if (!profile) throw std::invalid_argument("test function: missing profile");
  TestFunction t;
  t.family_ = family;
  t.profile_ = std::move(profile);
  t.lambda_ = lambda;
  t.tau_ = tau;
  t.nodes_ = phase.value.size();
  t.phase_ = std::move(phase);
  t.eprime_constant = lambda * t.profile_->ratio_bound();
  return t;
}

TestFunction TestFunction::explicit_jets(ExplicitJetFn fn, std::size_t nodes, double s_lo, double s_hi,
                                         double lambda_ref) {
  if (!(s_hi > s_lo)) throw std::invalid_argument("explicit test function: empty window");
  TestFunction t;
  t.family_ = Family::Explicit;
  t.fn_ = std::move(fn);
  t.nodes_ = nodes;
  t.s_lo_ = s_lo;
  t.s_hi_ = s_hi;
  t.lambda_ = lambda_ref;
  return t;
}

FrontJet TestFunction::jet(double s, std::size_t node) const {
  if (family_ == Family::Explicit) return fn_(s + tau_, node);
  const double lam = lambda_;
  const double z = lam * (s + tau_) + phase_.value[node];
  double p, p1, p2;
  profile_->eval(z, p, p1, p2);
  const Vec2& g = phase_.grad[node];
  const Mat2& H = phase_.hess[node];
  FrontJet j;
  j.phi = p;
  j.phi_s = lam * p1;
  j.phi_ss = lam * lam * p2;
  j.grad = {p1 * g[0], p1 * g[1]};
  j.grad_s = {lam * p2 * g[0], lam * p2 * g[1]};
  j.hess = {p2 * g[0] * g[0] + p1 * H.xx, p2 * g[0] * g[1] + p1 * H.xy, p2 * g[1] * g[0] + p1 * H.yx,
            p2 * g[1] * g[1] + p1 * H.yy};
  return j;
}

std::pair<double, double> TestFunction::default_window() const {
  if (family_ == Family::Explicit) return {s_lo_ - tau_, s_hi_ - tau_};
  const auto [zlo, zhi] = profile_->window();
  return {(zlo - phase_.max()) / lambda_ - tau_, (zhi - phase_.min()) / lambda_ - tau_};
}

TestFunction TestFunction::shifted(double dtau) const {
  TestFunction t = *this;
  t.tau_ += dtau;
  return t;
}

}  // namespace pulsefront
