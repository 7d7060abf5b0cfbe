#include "pulsefront/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pulsefront/errors.hpp"
#include "pulsefront/spectral.hpp"

namespace pulsefront {

OperatorMatrix assemble_Llambda(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Field& zeta,
                                double lambda, bool upwind) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("assemble_Llambda: lambda must be non-negative");
  const std::size_t n = grid.size();
  if (A.A.size() != n || q.q.size() != n || zeta.size() != n)
    throw std::invalid_argument("assemble_Llambda: media not sampled on this grid");
  const StencilSet ops(grid);
  const Vec2 e = grid.spec().e_tilde();

  VectorField drift(n), Ae(n);
  Field diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    Ae[i] = A.A[i].apply(e);
    drift[i] = {q.q[i][0] + 2.0 * lambda * Ae[i][0], q.q[i][1] + 2.0 * lambda * Ae[i][1]};
    if (grid.dim() == 1) drift[i][1] = 0.0;
  }
  const Field divAe = ops.divergence(Ae);
  for (std::size_t i = 0; i < n; ++i)
    diag[i] = lambda * lambda * A.A[i].quadratic(e) + lambda * divAe[i] + lambda * dot(q.q[i], e) + zeta[i];

  SparseMatrix M = ops.div_A_grad(A.A);
  M += ops.drift(drift, upwind);
  SparseMatrix D(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  D.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(n), 1));
  for (std::size_t i = 0; i < n; ++i) D.insert(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  M += D;
  M.makeCompressed();
  return OperatorMatrix{std::move(M), lambda, upwind, grid.spec().geometry};
}

CoefficientJets CoefficientJets::build(const Grid& grid, const DiffusionField& A, const AdvectionField& q) {
  const std::size_t n = grid.size();
  if (A.A.size() != n || q.q.size() != n) throw std::invalid_argument("coefficient jets: media size mismatch");
  CoefficientJets c;
  c.A = A.A;
  c.q = q.q;
  c.e = grid.spec().e_tilde();
  const NodalDifferentiator nd(grid);
  Field axx(n), axy(n), ayx(n), ayy(n), aex(n), aey(n);
  c.a.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    axx[i] = A.A[i].xx;
    axy[i] = A.A[i].xy;
    ayx[i] = A.A[i].yx;
    ayy[i] = A.A[i].yy;
    const Vec2 ae = A.A[i].apply(c.e);
    aex[i] = ae[0];
    aey[i] = ae[1];
    c.a[i] = A.A[i].quadratic(c.e);
  }
  const Field dx_axx = nd.derivative(axx, 0), dy_ayx = nd.derivative(ayx, 1);
  const Field dx_axy = nd.derivative(axy, 0), dy_ayy = nd.derivative(ayy, 1);
  const Field dx_aex = nd.derivative(aex, 0), dy_aey = nd.derivative(aey, 1);
  c.divA.resize(n);
  c.divAe.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.divA[i] = {dx_axx[i] + dy_ayx[i], dx_axy[i] + dy_ayy[i]};
    c.divAe[i] = dx_aex[i] + dy_aey[i];
  }
  return c;
}

double front_form(const CoefficientJets& coef, std::size_t node, const FrontJet& j) {
  const Mat2& A = coef.A[node];
  const double a_hess = A.xx * j.hess.xx + A.xy * j.hess.xy + A.yx * j.hess.yx + A.yy * j.hess.yy;
  const Vec2 ae = A.apply(coef.e);
  return a_hess + dot(coef.divA[node], j.grad) + coef.a[node] * j.phi_ss + coef.divAe[node] * j.phi_s +
         2.0 * dot(ae, j.grad_s);
}

double apply_front_operator(const CoefficientJets& coef, std::size_t node, double c, const FrontJet& j) {
  return front_form(coef, node, j) + dot(coef.q[node], j.grad) + (dot(coef.q[node], coef.e) - c) * j.phi_s;
}

Field apply_front_operator(const CoefficientJets& coef, double c, const TestFunction& phi, double s) {
  Field out(coef.size());
  for (std::size_t i = 0; i < coef.size(); ++i) out[i] = apply_front_operator(coef, i, c, phi.jet(s, i));
  return out;
}

namespace {

double r_of_jet(const CoefficientJets& coef, const Nonlinearity& f, std::size_t node, const FrontJet& j,
                double floor, double s) {
  if (!(j.phi_s > floor)) {
    std::ostringstream os;
    os << "test function not admissible: phi_s = " << j.phi_s << " at s = " << s << ", node " << node;
    throw AdmissibilityError(os.str());
  }
  return (front_form(coef, node, j) + dot(coef.q[node], j.grad) + f(node, j.phi)) / j.phi_s +
         dot(coef.q[node], coef.e);
}

}  // namespace

double R_value(const CoefficientJets& coef, const Nonlinearity& f, const TestFunction& phi, double s,
               std::size_t node) {
  return r_of_jet(coef, f, node, phi.jet(s, node), 1e-14, s);
}

RFieldSample evaluate_R(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                        const TestFunction& phi, const REvalOptions& opts) {
  return evaluate_R(grid, CoefficientJets::build(grid, A, q), f, phi, opts);
}

RFieldSample evaluate_R(const Grid& grid, const CoefficientJets& coef, const Nonlinearity& f, const TestFunction& phi,
                        const REvalOptions& opts) {
  const std::size_t n = grid.size();
  if (coef.size() != n || f.size() != n || phi.nodes() != n)
    throw std::invalid_argument("evaluate_R: inputs not sampled on this grid");
  if (opts.s_samples < 129) throw std::invalid_argument("evaluate_R: at least 129 s-samples required");
  const auto [lo, hi] = opts.window ? *opts.window : phi.default_window();
  if (!(hi > lo)) throw std::invalid_argument("evaluate_R: empty s-window");

  const int ns = opts.s_samples;
  const double ds = (hi - lo) / (ns - 1);
  RFieldSample out;
  out.nodes = n;
  out.s.resize(static_cast<std::size_t>(ns));
  for (int k = 0; k < ns; ++k) out.s[static_cast<std::size_t>(k)] = lo + ds * k;
  if (opts.store_values) out.values.resize(static_cast<std::size_t>(ns) * n);

  out.sup = -std::numeric_limits<double>::infinity();
  out.inf = std::numeric_limits<double>::infinity();
  int sup_k = 0, inf_k = 0;

  // end blocks for the stabilization check of explicit families
  const int block = std::max(2, ns / 10);
  std::vector<double> lo_min(n, std::numeric_limits<double>::infinity()), lo_max(n, -lo_min[0]);
  std::vector<double> hi_min(n, lo_min[0]), hi_max(n, -lo_min[0]);
  Field first(n), last(n);

  for (int k = 0; k < ns; ++k) {
    const double s = out.s[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < n; ++i) {
      const FrontJet j = phi.jet(s, i);
      const double r = r_of_jet(coef, f, i, j, opts.admissibility_floor, s);
      if (!std::isfinite(r)) throw AdmissibilityError("R is not finite at a sample");
      out.eprime_ratio = std::max(out.eprime_ratio, std::abs(j.phi_ss) / j.phi_s);
      if (opts.store_values) out.values[static_cast<std::size_t>(k) * n + i] = r;
      if (r > out.sup) {
        out.sup = r;
        sup_k = k;
        out.sup_node = i;
      }
      if (r < out.inf) {
        out.inf = r;
        inf_k = k;
        out.inf_node = i;
      }
      if (k < block) {
        lo_min[i] = std::min(lo_min[i], r);
        lo_max[i] = std::max(lo_max[i], r);
      }
      if (k >= ns - block) {
        hi_min[i] = std::min(hi_min[i], r);
        hi_max[i] = std::max(hi_max[i], r);
      }
      if (k == 0) first[i] = r;
      if (k == ns - 1) last[i] = r;
    }
  }
  out.sup_lattice = out.sup;
  out.inf_lattice = out.inf;
  out.sup_s = out.s[static_cast<std::size_t>(sup_k)];
  out.inf_s = out.s[static_cast<std::size_t>(inf_k)];

  // refinement around the interior extrema
  auto refine = [&](double& best, double& best_s, std::size_t node, bool maximize) {
    double h = ds;
    for (int pass = 0; pass < opts.refine_passes; ++pass) {
      h *= 0.5;
      const double centre = best_s;
      for (double cand : {centre - h, centre + h}) {
        if (cand < lo || cand > hi) continue;
        const double r = r_of_jet(coef, f, node, phi.jet(cand, node), opts.admissibility_floor, cand);
        if (maximize ? r > best : r < best) {
          best = r;
          best_s = cand;
        }
      }
    }
  };
  refine(out.sup, out.sup_s, out.sup_node, true);
  refine(out.inf, out.inf_s, out.inf_node, false);

  out.tail_minus.resize(n);
  out.tail_plus.resize(n);
  if (phi.analytic_tails()) {
    const double lam = phi.lambda();
    const double nl = phi.profile()->nu_left();
    const double nr = phi.profile()->nu_right();
    const SpatialPhase& ph = phi.phase();
    for (std::size_t i = 0; i < n; ++i) {
      const Mat2& Ai = coef.A[i];
      const Vec2& g = ph.grad[i];
      const Mat2& H = ph.hess[i];
      const Vec2 ae = Ai.apply(coef.e);
      const double B = (Ai.quadratic(g) + 2.0 * lam * dot(ae, g) + coef.a[i] * lam * lam) / lam;
      const double C = (Ai.xx * H.xx + Ai.xy * H.xy + Ai.yx * H.yx + Ai.yy * H.yy + dot(coef.divA[i], g) +
                        dot(coef.q[i], g)) / lam +
                       coef.divAe[i] + dot(coef.q[i], coef.e);
      out.tail_minus[i] = B * nl + C + f.zeta()[i] / (lam * nl);
      out.tail_plus[i] = -B * nr + C - f.slope_at_one()[i] / (lam * nr);
    }
  } else {
    out.tails_analytic = false;
    out.limits_checked_on_window_only = true;
    // 1% of the sampled magnitude of R, so limits near zero are not judged relatively
    const double scale = std::max({std::abs(out.sup_lattice), std::abs(out.inf_lattice), 1e-12});
    for (std::size_t i = 0; i < n; ++i) {
      const double scale_lo = std::max({std::abs(lo_min[i]), std::abs(lo_max[i]), scale});
      const double scale_hi = std::max({std::abs(hi_min[i]), std::abs(hi_max[i]), scale});
      if (lo_max[i] - lo_min[i] > 0.01 * scale_lo || hi_max[i] - hi_min[i] > 0.01 * scale_hi) {
        std::ostringstream os;
        os << "R has not stabilized at the window ends (node " << i << ": spread " << lo_max[i] - lo_min[i]
           << " at the start, " << hi_max[i] - hi_min[i] << " at the end)";
        throw TailError(os.str());
      }
      out.tail_minus[i] = first[i];
      out.tail_plus[i] = last[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (int side : {-1, 1}) {
      const double v = side < 0 ? out.tail_minus[i] : out.tail_plus[i];
      if (v > out.sup) {
        out.sup = v;
        out.sup_node = i;
        out.sup_where = side;
        out.sup_s = side * std::numeric_limits<double>::infinity();
      }
      if (v < out.inf) {
        out.inf = v;
        out.inf_node = i;
        out.inf_where = side;
        out.inf_s = side * std::numeric_limits<double>::infinity();
      }
    }
  }
  return out;
}

}  // namespace pulsefront
