#include "pulsefront/kpp_speed.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pulsefront/errors.hpp"

namespace pulsefront {

std::string to_string(Route r) {
  switch (r) {
    case Route::Eigenvalue: return "eigenvalue";
    case Route::UpperBound: return "upper_bound";
    case Route::LowerBound: return "lower_bound";
    case Route::Simulation: return "simulation";
  }
  return "unknown";
}

Route route_from_string(const std::string& s) {
  if (s == "eigenvalue") return Route::Eigenvalue;
  if (s == "upper_bound" || s == "upper") return Route::UpperBound;
  if (s == "lower_bound" || s == "lower") return Route::LowerBound;
  if (s == "simulation") return Route::Simulation;
  throw std::invalid_argument("unknown route '" + s + "'");
}

namespace {

// k(lambda) / lambda with a cache and warm starts from the nearest solved lambda.
class SpeedFunction {
 public:
  SpeedFunction(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Field& zeta,
                const KppOptions& opts)
      : grid_(grid), A_(A), q_(q), zeta_(zeta), opts_(opts) {}

  double operator()(double lambda) {
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second.k / lambda;
    const Field* warm = nullptr;
    if (!cache_.empty()) {
      auto hi = cache_.lower_bound(lambda);
      if (hi == cache_.end()) --hi;
      else if (hi != cache_.begin()) {
        auto lo = std::prev(hi);
        if (std::abs(lo->first - lambda) < std::abs(hi->first - lambda)) hi = lo;
      }
      warm = &hi->second.psi;
    }
    const OperatorMatrix M = assemble_Llambda(grid_, A_, q_, zeta_, lambda, opts_.upwind);
    EigenPair p = principal_eigenpair(M, opts_.eigen, warm);
    ++solves_;
    const double g = p.k / lambda;
    cache_.emplace(lambda, std::move(p));
    return g;
  }

  const EigenPair& pair(double lambda) const { return cache_.at(lambda); }
  int solves() const { return solves_; }

 private:
  const Grid& grid_;
  const DiffusionField& A_;
  const AdvectionField& q_;
  const Field& zeta_;
  const KppOptions& opts_;
  std::map<double, EigenPair> cache_;
  int solves_ = 0;
};

constexpr double kInvPhi = 0.6180339887498949;

// golden section on [a, b] for a minimum of g; returns the best abscissa seen
double golden(SpeedFunction& g, double a, double b, double rel_tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > rel_tol * 0.5 * (a + b)) {
    if (gc <= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  return gc <= gd ? c : d;
}

}  // namespace

KppSpeed minimal_speed_kpp(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                           const KppOptions& opts) {
  if (f.cls() != NonlinearityClass::KPP) throw ClassError("minimal_speed_kpp: nonlinearity is not of KPP type");
  if (!(f.min_zeta() > 0.0)) throw ClassError("minimal_speed_kpp: f'(0) must be positive at every node");

  SpeedFunction g(grid, A, q, f.zeta(), opts);
  const double lim_lo = std::ldexp(1.0, -20), lim_hi = std::ldexp(1.0, 20);

  double l1 = opts.lambda_start;
  double l0 = 0.5 * l1, l2 = 2.0 * l1;
  double g0 = g(l0), g1 = g(l1), g2 = g(l2);
  while (!(g0 >= g1 && g2 >= g1)) {
    if (g0 < g1) {
      l2 = l1, g2 = g1;
      l1 = l0, g1 = g0;
      l0 = 0.5 * l1;
      if (l0 < lim_lo) throw BracketError("minimal_speed_kpp: no bracket for lambda above 2^-20");
      g0 = g(l0);
    } else {
      l0 = l1, g0 = g1;
      l1 = l2, g1 = g2;
      l2 = 2.0 * l1;
      if (l2 > lim_hi) throw BracketError("minimal_speed_kpp: no bracket for lambda below 2^20");
      g2 = g(l2);
    }
  }

  KppSpeed out;
  out.bracket = {l0, l1, l2};
  out.g_bracket = {g0, g1, g2};

  double best = golden(g, l0, l2, opts.lambda_tol);
  double gbest = g(best);

  if (opts.scan_backstop && opts.scan_points >= 3) {
    const int m = opts.scan_points;
    double scan_best = 0.0, scan_g = std::numeric_limits<double>::infinity();
    int scan_idx = 0;
    std::vector<double> grid_l(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      grid_l[static_cast<std::size_t>(i)] = l0 * std::pow(l2 / l0, static_cast<double>(i) / (m - 1));
      const double v = g(grid_l[static_cast<std::size_t>(i)]);
      if (v < scan_g) scan_g = v, scan_best = grid_l[static_cast<std::size_t>(i)], scan_idx = i;
    }
    if (scan_g < gbest * (1.0 - 1e-6)) {
      const double a = grid_l[static_cast<std::size_t>(std::max(0, scan_idx - 1))];
      const double b = grid_l[static_cast<std::size_t>(std::min(m - 1, scan_idx + 1))];
      const double cand = golden(g, a, b, opts.lambda_tol);
      best = g(cand) < scan_g ? cand : scan_best;
      gbest = g(best);
      out.scan_restarted = true;
    }
  }

  out.lambda_star = best;
  out.pair = g.pair(best);
  out.eigen_solves = g.solves();
  SpeedEstimate& e = out.estimate;
  e.route = Route::Eigenvalue;
  e.value = gbest;
  e.uncertainty = out.pair.residual / best + 1e-12 * std::abs(gbest);
  e.detail = {{"lambda_star", best},
              {"k", out.pair.k},
              {"eigen_residual", out.pair.residual},
              {"bracket", {l0, l1, l2}},
              {"g_bracket", {g0, g1, g2}},
              {"eigen_solves", out.eigen_solves},
              {"scan_restarted", out.scan_restarted},
              {"upwind", opts.upwind}};
  return out;
}

// ---------------------------------------------------------------- report

nlohmann::json ConsistencyReport::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"route", to_string(r.route)}, {"status", r.status}, {"value", r.value},
                         {"uncertainty", r.uncertainty}});
  j["flags"] = nlohmann::json::array();
  for (const auto& f : flags) j["flags"].push_back({{"rule", f.rule}, {"message", f.message}});
  j["consistent"] = consistent();
  return j;
}

std::string ConsistencyReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << to_string(r.route) << "  ";
    if (r.ok())
      os << r.value << " +- " << r.uncertainty;
    else
      os << "[" << r.status << "]";
    os << "\n";
  }
  for (const auto& f : flags) os << "FLAG " << f.rule << ": " << f.message << "\n";
  if (!rows.empty()) os << (consistent() ? "consistent\n" : "inconsistent\n");
  return os.str();
}

ConsistencyReport speed_report(const std::vector<SpeedEstimate>& estimates, double gap_tol) {
  ConsistencyReport rep;
  rep.rows = estimates;
  auto pick = [&](Route r) -> std::optional<SpeedEstimate> {
    for (const auto& e : estimates)
      if (e.route == r && e.ok()) return e;
    return std::nullopt;
  };
  const auto eig = pick(Route::Eigenvalue), up = pick(Route::UpperBound), low = pick(Route::LowerBound),
             sim = pick(Route::Simulation);
  auto order = [&](const std::optional<SpeedEstimate>& a, const std::optional<SpeedEstimate>& b,
                   const std::string& rule) {
    if (!a || !b) return;
    const double slack = a->uncertainty + b->uncertainty + 1e-12 * std::max(std::abs(a->value), std::abs(b->value));
    if (a->value > b->value + slack) {
      std::ostringstream os;
      os << to_string(a->route) << " " << a->value << " exceeds " << to_string(b->route) << " " << b->value;
      rep.flags.push_back({rule, os.str()});
    }
  };
  order(low, sim, "lower<=simulation");
  order(sim, up, "simulation<=upper");
  order(low, up, "lower<=upper");
  order(eig, up, "eigenvalue<=upper");
  if (eig && up && std::abs(up->value - eig->value) > gap_tol * std::abs(eig->value) + up->uncertainty + eig->uncertainty) {
    std::ostringstream os;
    os << "upper bound " << up->value << " is more than " << gap_tol * 100 << "% above eigenvalue " << eig->value;
    rep.flags.push_back({"eigenvalue~upper", os.str()});
  }
  if (eig && sim && std::abs(sim->value - eig->value) > gap_tol * std::abs(eig->value) + sim->uncertainty) {
    std::ostringstream os;
    os << "simulation " << sim->value << " deviates from eigenvalue " << eig->value;
    rep.flags.push_back({"eigenvalue~simulation", os.str()});
  }
  return rep;
}

}  // namespace pulsefront
