// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// usage: acceptance [source_dir]   (source_dir holds configs/)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "pulsefront/bounds.hpp"
#include "pulsefront/experiment.hpp"
#include "pulsefront/frontsim.hpp"
#include "pulsefront/kpp_speed.hpp"
#include "pulsefront/planar_front.hpp"
#include "pulsefront/principal.hpp"

using namespace pulsefront;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

fs::path g_source;
fs::path g_bindir;

Config load_config(const std::string& name) { return Config::load((g_source / "configs" / (name + ".cfg")).string()); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// ---------------------------------------------------------------- 1

void constant_kpp_eigenvalue(Verdict& v) {
  const Grid g(CellSpec::torus2d(1.0, 1.0), {64, 64});
  const AdvectionField q = AdvectionField::zero(g);
  for (auto [a, zeta] : {std::pair{1.0, 1.0}, {4.0, 1.0}, {1.0, 9.0}}) {
    const auto t0 = Clock::now();
    const DiffusionField A = DiffusionField::constant(g, Mat2::diagonal(a, a));
    ReactionProfile p = ReactionProfile::fisher();
    p.g = [zeta](double u) { return zeta * u * (1.0 - u); };
    p.dg0 = zeta;
    p.slope1 = -zeta;
    p.lipschitz = zeta;
    const Nonlinearity f = make_homogeneous_nonlinearity(g, p);
    const KppSpeed s = minimal_speed_kpp(g, A, q, f);
    const double dt = seconds_since(t0);
    const double c = 2.0 * std::sqrt(a * zeta), lam = std::sqrt(zeta / a);
    v.detail << " (a=" << a << ",zeta=" << zeta << "): c=" << s.estimate.value << " lambda=" << s.lambda_star << " "
             << dt << "s;";
    v.require(rel(s.estimate.value, c) <= 1e-3, "c* within 1e-3");
    v.require(rel(s.lambda_star, lam) <= 1e-3, "lambda* within 1e-3");
    v.require(dt < 5.0, "under 5 s");
  }
}

// ---------------------------------------------------------------- 2

void eigen_oracle(Verdict& v) {
  const auto t0 = Clock::now();
  struct Case {
    const char* name;
    std::vector<std::pair<std::string, std::string>> overrides;
  };
  const std::vector<Case> cases = {{"kpp_sinusoidal", {}},
                                   {"cellular_flow", {{"grid.nx", "24"}, {"grid.ny", "24"}}},
                                   {"cylinder_shear", {{"grid.nx", "24"}, {"grid.ny", "20"}}}};
  double worst_k = 0.0, worst_psi = 0.0;
  std::size_t largest = 0;
  for (const auto& c : cases) {
    Config cfg = load_config(c.name);
    for (const auto& [k, val] : c.overrides) cfg.set(k, val);
    const Media m = build_media(cfg);
    v.require(m.grid.size() <= 1024, "at most 1024 nodes");
    largest = std::max(largest, m.grid.size());
    for (double lambda : {0.0, 0.5, 1.0, 2.0}) {
      const OperatorMatrix M = assemble_Llambda(m.grid, m.A, m.q, m.f.zeta(), lambda);
      const EigenPair p = principal_eigenpair(M);
      const Eigen::MatrixXd D(M.M);
      const Eigen::EigenSolver<Eigen::MatrixXd> es(D, false);
      const double k_dense = es.eigenvalues().real().maxCoeff();
      // eigenvector by dense inverse iteration just above the dense eigenvalue
      const double shift = k_dense + 1e-7 * std::max(1.0, std::abs(k_dense));
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(D - shift * Eigen::MatrixXd::Identity(D.rows(), D.cols()));
      Eigen::VectorXd w = Eigen::VectorXd::Ones(D.rows());
      for (int it = 0; it < 4; ++it) w = lu.solve(w).normalized();
      if (w.sum() < 0.0) w = -w;
      w /= w.maxCoeff();
      double dpsi = 0.0;
      for (std::size_t i = 0; i < p.psi.size(); ++i)
        dpsi = std::max(dpsi, std::abs(p.psi[i] - w[static_cast<Eigen::Index>(i)]));
      const double dk = std::abs(p.k - k_dense) / std::max(1.0, std::abs(k_dense));
      worst_k = std::max(worst_k, dk);
      worst_psi = std::max(worst_psi, dpsi);
    }
  }
  const double dt = seconds_since(t0);
  v.detail << " largest matrix " << largest << " nodes; max |k - k_dense|=" << worst_k << " max |psi - psi_dense|=" << worst_psi << " " << dt << "s";
  v.require(worst_k <= 1e-8, "eigenvalue within 1e-8");
  v.require(worst_psi <= 1e-8, "eigenvector within 1e-8");
  v.require(dt < 30.0, "under 30 s");
}

// ---------------------------------------------------------------- 3

void minmax_upper_bound(Verdict& v) {
  const Grid g(CellSpec::torus1d(1.0), {64});
  const AdvectionField q = AdvectionField::zero(g);
  for (auto [a, zeta] : {std::pair{1.0, 1.0}, {4.0, 1.0}, {1.0, 9.0}}) {
    const DiffusionField A = DiffusionField::constant(g, Mat2::diagonal(a, 0.0));
    const Field h(g.size(), zeta);
    const Nonlinearity f = make_product_nonlinearity(g, h, ReactionProfile::fisher());
    const BoundResult r = upper_bound_minmax(g, A, q, f);
    const double c = 2.0 * std::sqrt(a * zeta);
    v.detail << " constant (a=" << a << ",zeta=" << zeta << "): " << r.estimate.value << ";";
    v.require(rel(r.estimate.value, c) <= 1e-3, "constant-coefficient bound within 1e-3");
  }
  const Config cfg = load_config("kpp_sinusoidal");
  const Media m = build_media(cfg);
  const double cstar = minimal_speed_kpp(m.grid, m.A, m.q, m.f, build_kpp_options(cfg)).estimate.value;
  BoundOptions o = build_bound_options(cfg, m);
  o.cut = 8;
  o.coeffs0.clear();  // optimize from psi = 1 so the whole descent is checked
  const BoundResult r = upper_bound_minmax(m.grid, m.A, m.q, m.f, o);
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& e : r.encountered) lowest = std::min(lowest, e.first);
  v.detail << " sinusoidal: c*=" << cstar << " bound=" << r.estimate.value << " lowest sup R seen=" << lowest << " over "
           << r.encountered.size() << " test functions";
  v.require(lowest >= cstar - 1e-9 * cstar, "every bound >= c*");
  v.require(r.estimate.value <= 1.03 * cstar, "optimized bound within 3%");
}

// ---------------------------------------------------------------- 4

void tail_consistency(Verdict& v) {
  // 2-D media at 64 nodes per axis: the tail formula differentiates the phase
  // exactly, the eigenproblem by finite differences, and that gap is O(h^2)
  const std::vector<std::pair<const char*, std::pair<const char*, const char*>>> media = {
      {"kpp_sinusoidal", {"64", "1"}}, {"cellular_flow", {"64", "64"}}, {"cylinder_shear", {"64", "48"}}};
  for (const auto& [name, n] : media) {
    Config cfg = load_config(name);
    cfg.set("grid.nx", n.first);
    cfg.set("grid.ny", n.second);
    const Media m = build_media(cfg);
    KppOptions ko = build_kpp_options(cfg);
    ko.upwind = false;  // the tail formula uses centered derivatives
    const KppSpeed ks = minimal_speed_kpp(m.grid, m.A, m.q, m.f, ko);
    const OperatorMatrix M = assemble_Llambda(m.grid, m.A, m.q, m.f.zeta(), ks.lambda_star, false);
    const TailCheck t = tail_limit_check(m.grid, m.A, m.q, m.f, ks.pair, M, 8);
    // projection error: discrete residual of the truncated eigenfunction, plus
    // the gap between spectral and finite-difference derivatives of the phase
    const double allowed = 2.0 * t.discrete_projection_residual + 1e-3 * t.k_over_lambda;
    v.detail << " " << name << ": k/lambda=" << t.k_over_lambda << " log projection error=" << t.log_projection_error
             << " tail dev=" << t.max_tail_deviation
             << " (allowed " << allowed << ") sup R=" << t.sup_R << ";";
    v.require(t.max_tail_deviation <= allowed, std::string(name) + " tail within projection error");
    v.require(t.sup_R <= 1.02 * t.k_over_lambda, std::string(name) + " sup R within 2%");
  }
}

// ---------------------------------------------------------------- 5

void combustion_sandwich(Verdict& v) {
  const auto t0 = Clock::now();
  const Config cfg = load_config("combustion_homogeneous");
  const Media m = build_media(cfg);
  const double c0 = solve_planar_front(m.f, 1.0).c0;
  BoundOptions o = build_bound_options(cfg, m);
  o.family = Family::PlanarProfile;
  o.profile = mean_planar_profile(m);
  const BoundResult up = upper_bound_minmax(m.grid, m.A, m.q, m.f, o);
  const BoundResult lo = lower_bound_maxmin(m.grid, m.A, m.q, m.f, o);
  const SpeedEstimate sim = measure_front_speed(build_strip(cfg, m), m.A, m.q, m.f, build_sim_options(cfg, m));
  const double dt = seconds_since(t0);
  v.detail << " c0=" << c0 << " lower=" << lo.estimate.value << " upper=" << up.estimate.value
           << " simulation=" << sim.value << " +- " << sim.uncertainty << " " << dt << "s";
  v.require(std::abs(up.estimate.value - lo.estimate.value) <= 1e-3 * c0, "|upper - lower| <= 1e-3 c0");
  v.require(rel(up.estimate.value, c0) <= 1e-3 && rel(lo.estimate.value, c0) <= 1e-3, "bounds within 1e-3 of c0");
  v.require(rel(sim.value, c0) <= 0.02, "simulation within 2%");
  v.require(dt < 120.0, "under 2 min");
}

// ---------------------------------------------------------------- 6

void front_r_constancy(Verdict& v) {
  const Grid cell(CellSpec::torus1d(1.0), {32});
  const DiffusionField A = DiffusionField::constant(cell, Mat2::diagonal(1.0, 0.0));
  const AdvectionField q = AdvectionField::zero(cell);
  const Nonlinearity f = make_homogeneous_nonlinearity(cell, ReactionProfile::ignition(0.3));
  const PlanarFront pf = solve_planar_front(f, 1.0);
  // long strip: the clamped ends disturb the tails within about 15 units
  const StripDomain d = StripDomain::make(cell, 80);
  SimOptions o;
  o.dt = 0.005;
  o.t_burn = 40;
  o.t_fit = 20;
  o.initial = InitialKind::PlanarSeed;
  o.seed = pf.profile;
  o.snapshot_every = 0.05;
  o.snapshot_from = 50;
  const SimRun run = run_front_simulation(d, A, q, f, o);
  const TestFunction phi = extract_front_testfunction(d, run.snapshots, run.estimate.value);
  const RFieldSample r = evaluate_R(cell, A, q, f, phi);
  const auto [s_lo, s_hi] = phi.default_window();
  v.detail << " c=" << run.estimate.value << " sup R=" << r.sup << " inf R=" << r.inf << " spread/c0="
           << (r.sup - r.inf) / pf.c0 << " over s in [" << s_lo << ", " << s_hi << "]";
  v.require(r.sup - r.inf < 0.05 * pf.c0, "sup R - inf R < 5% c0");
}

// ---------------------------------------------------------------- 7

void cutoff_convergence(Verdict& v) {
  const Config cfg = load_config("kpp_homogeneous");
  const Media m = build_media(cfg);
  const std::vector<double> thetas = {0.4, 0.2, 0.1, 0.05};
  const auto curve = measure_c_theta_curve(build_strip(cfg, m), m.A, m.q, m.f, thetas, build_sim_options(cfg, m));
  bool monotone = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    v.detail << " theta=" << thetas[i] << ": " << curve[i].value << " +- " << curve[i].uncertainty << ";";
    if (i > 0 && curve[i].value < curve[i - 1].value - (curve[i].uncertainty + curve[i - 1].uncertainty))
      monotone = false;
  }
  v.require(monotone, "non-decreasing as theta decreases");
  v.require(rel(curve.back().value, 2.0) <= 0.05, "theta = 0.05 within 5% of c* = 2");
}

// ---------------------------------------------------------------- 8

void pulsating_periodicity(Verdict& v) {
  const Config cfg = load_config("combustion_cellular");
  const Media m = build_media(cfg);
  const StripDomain d = build_strip(cfg, m);
  const SimRun run = run_front_simulation(d, m.A, m.q, m.f, build_sim_options(cfg, m));
  const PulsatingCheck pc = pulsating_mismatch(d, run.snapshots, run.estimate.value);
  v.detail << " 2-D cellular flow, modulated ignition source: c=" << run.estimate.value << " mismatch=" << pc.mismatch
           << " at t=" << pc.t;
  v.require(pc.mismatch < 1e-2, "mismatch < 1e-2");
}

// ---------------------------------------------------------------- 9

void property_suites(Verdict& v, double elapsed_so_far) {
  const auto t0 = Clock::now();
  const char* suites[] = {"cell", "media", "spectral", "opcore", "principal", "kpp_speed",
                          "planar_front", "bounds", "frontsim", "config"};
  for (const char* s : suites) {
    const fs::path exe = g_bindir / (std::string("test_") + s);
    const std::string cmd = "\"" + exe.string() + "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    v.detail << " " << s << (rc == 0 ? ":ok" : ":FAILED");
    v.require(rc == 0, std::string(s) + " suite green");
  }
  const double dt = seconds_since(t0);
  v.detail << "; unit suites " << dt << "s, with acceptance " << dt + elapsed_so_far << "s";
  v.require(dt + elapsed_so_far < 600.0, "total under 10 min");
}

}  // namespace

int main(int argc, char** argv) {
  g_source = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  g_bindir = fs::absolute(fs::path(argv[0])).parent_path();

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Verdict&)> run;
  };
  const auto start = Clock::now();
  const std::vector<Criterion> criteria = {
      {1, "constant-coefficient KPP eigenvalue route", constant_kpp_eigenvalue},
      {2, "principal eigenpair against a dense oracle", eigen_oracle},
      {3, "min-max upper bound", minmax_upper_bound},
      {4, "tail limit of the eigenfunction test function", tail_consistency},
      {5, "combustion sandwich", combustion_sandwich},
      {6, "R constancy on an extracted front", front_r_constancy},
      {7, "cut-off convergence to the KPP speed", cutoff_convergence},
      {8, "pulsating periodicity", pulsating_periodicity},
      {9, "property suites", [&](Verdict& v) { property_suites(v, seconds_since(start)); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    if (!v.pass) ++failed;
    std::printf("%s %d %s (%.1fs):%s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
