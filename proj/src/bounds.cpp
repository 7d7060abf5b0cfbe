#include "pulsefront/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "pulsefront/errors.hpp"

namespace pulsefront {

TestFunction make_exp_sigmoid(const Grid& grid, double lambda, const PhaseBasis& basis,
                              const std::vector<double>& log_psi_coeffs, double tau) {
  if (!(lambda > 0.0)) throw std::invalid_argument("make_exp_sigmoid: lambda must be positive");
  static const auto logistic = std::make_shared<const LogisticProfile>();
  return TestFunction::structured(Family::ExpSigmoid, logistic, lambda, SpatialPhase::build(grid, basis, log_psi_coeffs),
                                  tau);
}

TestFunction make_planar_profile(const Grid& grid, std::shared_ptr<const Profile> profile, double lambda,
                                 const PhaseBasis& basis, const std::vector<double>& coeffs, double tau) {
  return TestFunction::structured(Family::PlanarProfile, std::move(profile), lambda,
                                  SpatialPhase::build(grid, basis, coeffs), tau);
}

std::vector<double> project_log_psi(const Grid& grid, const PhaseBasis& basis, const Field& psi) {
  Field lg(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!(psi[i] > 0.0)) throw std::invalid_argument("project_log_psi: psi must be positive");
    lg[i] = std::log(psi[i]);
  }
  return project_onto(grid, basis, lg);
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;

class Optimizer {
 public:
  Optimizer(const Grid& grid, const CoefficientJets& coef, const Nonlinearity& f, const BoundOptions& opts, bool upper)
      : grid_(grid), coef_(coef), f_(f), opts_(opts), upper_(upper), basis_(grid, opts.cut) {
    if (opts.family == Family::PlanarProfile && !opts.profile)
      throw std::invalid_argument("bounds: planar-profile family needs a profile");
    if (opts.family == Family::Explicit) throw std::invalid_argument("bounds: explicit family cannot be optimized");
  }

  const PhaseBasis& basis() const { return basis_; }

  TestFunction build(const std::vector<double>& p) const {
    const double lambda = std::exp(p[0]);
    std::vector<double> c(p.begin() + 1, p.end());
    if (opts_.family == Family::ExpSigmoid) return make_exp_sigmoid(grid_, lambda, basis_, c);
    return make_planar_profile(grid_, opts_.profile, lambda, basis_, c);
  }

  // objective to minimize; +inf for inadmissible parameters
  double objective(const std::vector<double>& p) {
    ++evaluations_;
    try {
      const RFieldSample r = evaluate_R(grid_, coef_, f_, build(p), opts_.reval);
      encountered_.emplace_back(r.sup, r.inf);
      const double v = upper_ ? r.sup : -r.inf;
      if (v < best_value_) {
        best_value_ = v;
        best_p_ = p;
        log(p, v);
      }
      return v;
    } catch (const AdmissibilityError&) {
      ++rejected_;
    } catch (const TailError&) {
      ++rejected_;
    }
    return std::numeric_limits<double>::infinity();
  }

  // golden section in coordinate `c` over [p_c - d, p_c + d]
  void line_search(std::size_t c, double d) {
    double a = best_p_[c] - d, b = best_p_[c] + d;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    auto at = [&](double x) {
      std::vector<double> t = best_p_;
      t[c] = x;
      return objective(t);
    };
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < opts_.golden_iters; ++it) {
      if (f1 <= f2) {
        b = x2, x2 = x1, f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = at(x1);
      } else {
        a = x1, x1 = x2, f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = at(x2);
      }
    }
  }

  void run_from(std::vector<double> p) {
    const double v = objective(p);
    if (!std::isfinite(v) && !std::isfinite(best_value_))
      throw AdmissibilityError("bounds: initial test function is not admissible");
    history_.push_back(best_value_);
    if (opts_.optimize_lambda && opts_.lambda_prescan) line_search(0, opts_.lambda_scan_width);
    double d = opts_.delta0;
    for (int sweep = 0; sweep < opts_.sweeps; ++sweep) {
      if (opts_.optimize_lambda) line_search(0, d);
      if (opts_.optimize_coeffs)
        for (std::size_t c = 1; c < best_p_.size(); ++c) line_search(c, d);
      history_.push_back(best_value_);
      d *= 0.5;
    }
  }

  void optimize(std::vector<double> p0) {
    run_from(p0);
    std::mt19937_64 rng(opts_.seed);
    std::uniform_real_distribution<double> u(-opts_.delta0, opts_.delta0);
    for (int r = 0; r < opts_.restarts; ++r) {
      std::vector<double> p = best_p_;
      for (std::size_t c = 0; c < p.size(); ++c) {
        const bool active = c == 0 ? opts_.optimize_lambda : opts_.optimize_coeffs;
        if (active) p[c] += u(rng);
      }
      run_from(p);
    }
  }

  const std::vector<double>& best_p() const { return best_p_; }
  double best_value() const { return best_value_; }
  int evaluations() const { return evaluations_; }
  int rejected() const { return rejected_; }
  std::vector<double> history() const { return history_; }
  std::vector<std::pair<double, double>> encountered() const { return encountered_; }

 private:
  void log(const std::vector<double>& p, double v) {
    if (!opts_.trajectory) return;
    std::ostream& os = *opts_.trajectory;
    if (!header_) {
      os << "evaluation,bound,lambda";
      for (std::size_t c = 1; c < p.size(); ++c) os << ",c" << c;
      os << "\n";
      header_ = true;
    }
    os << evaluations_ << "," << (upper_ ? v : -v) << "," << std::exp(p[0]);
    for (std::size_t c = 1; c < p.size(); ++c) os << "," << p[c];
    os << "\n";
  }

  const Grid& grid_;
  const CoefficientJets& coef_;
  const Nonlinearity& f_;
  const BoundOptions& opts_;
  bool upper_;
  PhaseBasis basis_;
  std::vector<double> best_p_;
  double best_value_ = std::numeric_limits<double>::infinity();
  int evaluations_ = 0;
  int rejected_ = 0;
  bool header_ = false;
  std::vector<double> history_;
  std::vector<std::pair<double, double>> encountered_;
};

BoundResult run_bound(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                      const BoundOptions& opts, bool upper) {
  if (!(opts.lambda0 > 0.0)) throw std::invalid_argument("bounds: lambda0 must be positive");
  const CoefficientJets coef = CoefficientJets::build(grid, A, q);
  Optimizer opt(grid, coef, f, opts, upper);
  std::vector<double> p0(1 + opt.basis().size(), 0.0);
  p0[0] = std::log(opts.lambda0);
  if (!opts.coeffs0.empty()) {
    if (opts.coeffs0.size() != opt.basis().size())
      throw std::invalid_argument("bounds: initial coefficients do not match the basis size");
    std::copy(opts.coeffs0.begin(), opts.coeffs0.end(), p0.begin() + 1);
  }
  opt.optimize(p0);

  BoundResult out;
  out.basis = opt.basis();
  out.lambda = std::exp(opt.best_p()[0]);
  out.coeffs.assign(opt.best_p().begin() + 1, opt.best_p().end());
  out.phi = opt.build(opt.best_p());
  REvalOptions ro = opts.reval;
  ro.store_values = false;
  out.best = evaluate_R(grid, coef, f, out.phi, ro);
  out.evaluations = opt.evaluations();
  out.rejected = opt.rejected();
  out.history = opt.history();
  for (double& h : out.history)
    if (!upper) h = -h;
  out.encountered = opt.encountered();

  SpeedEstimate& e = out.estimate;
  e.route = upper ? Route::UpperBound : Route::LowerBound;
  e.value = upper ? out.best.sup : out.best.inf;
  e.uncertainty = upper ? out.best.sup - out.best.sup_lattice : out.best.inf_lattice - out.best.inf;
  // the refinement gain only measures lattice resolution when the extremum is interior
  if ((upper ? out.best.sup_where : out.best.inf_where) != 0) e.uncertainty = 0.0;
  const std::size_t node = upper ? out.best.sup_node : out.best.inf_node;
  const Vec2 x = grid.point(node);
  const int where = upper ? out.best.sup_where : out.best.inf_where;
  const double s_at = upper ? out.best.sup_s : out.best.inf_s;
  e.detail = {{"family", to_string(opts.family)},
              {"lambda", out.lambda},
              {"cut", opts.cut},
              {"coefficients", out.coeffs},
              {"evaluations", out.evaluations},
              {"rejected", out.rejected},
              {"history", out.history},
              {"extremum",
               {{"where", where == 0 ? "interior" : (where < 0 ? "tail_minus" : "tail_plus")},
                {"s", where == 0 ? s_at : 0.0},
                {"node", node},
                {"x", x[0]},
                {"y", x[1]}}},
              {"sup", out.best.sup},
              {"inf", out.best.inf}};
  return out;
}

}  // namespace

BoundResult upper_bound_minmax(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                               const Nonlinearity& f, const BoundOptions& opts) {
  return run_bound(grid, A, q, f, opts, true);
}

BoundResult lower_bound_maxmin(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                               const Nonlinearity& f, const BoundOptions& opts) {
  if (f.cls() != NonlinearityClass::Combustion)
    throw ClassError("lower_bound_maxmin: max-min formula is undefined for " + to_string(f.cls()) + " sources");
  return run_bound(grid, A, q, f, opts, false);
}

TailCheck tail_limit_check(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                           const EigenPair& pair, const OperatorMatrix& M, int cut, const REvalOptions& opts) {
  if (!(pair.lambda > 0.0)) throw std::invalid_argument("tail_limit_check: lambda must be positive");
  const PhaseBasis basis(grid, cut);
  const std::vector<double> coeffs = project_log_psi(grid, basis, pair.psi);
  const TestFunction phi = make_exp_sigmoid(grid, pair.lambda, basis, coeffs);
  TailCheck out;
  out.k_over_lambda = pair.k / pair.lambda;
  out.sample = evaluate_R(grid, A, q, f, phi, opts);
  out.sup_R = out.sample.sup;
  const SpatialPhase& ph = phi.phase();
  Eigen::VectorXd psiK(static_cast<Eigen::Index>(grid.size()));
  // psi is only defined up to a factor, so the constant offset of log psi - Lambda is not an error
  double offset = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    offset += grid.weight(i) * (std::log(pair.psi[i]) - ph.value[i]);
    wsum += grid.weight(i);
  }
  offset /= wsum;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.max_tail_deviation = std::max(out.max_tail_deviation, std::abs(out.sample.tail_minus[i] - out.k_over_lambda));
    out.log_projection_error =
        std::max(out.log_projection_error, std::abs(std::log(pair.psi[i]) - ph.value[i] - offset));
    psiK[static_cast<Eigen::Index>(i)] = std::exp(ph.value[i]);
  }
  const Eigen::VectorXd w = M.M * psiK;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out.discrete_projection_residual =
        std::max(out.discrete_projection_residual, std::abs(w[k] / (pair.lambda * psiK[k]) - out.k_over_lambda));
  }
  return out;
}

}  // namespace pulsefront
