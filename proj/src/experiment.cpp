#include "pulsefront/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "pulsefront/errors.hpp"
#include "pulsefront/planar_front.hpp"

namespace pulsefront {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string resolve(const Config& cfg, const std::string& p) {
  namespace fs = std::filesystem;
  if (p.empty() || fs::path(p).is_absolute() || cfg.base_dir().empty()) return p;
  return (fs::path(cfg.base_dir()) / p).string();
}

// rows "i,j,v1,...,vk" keyed by node; lines that do not start with a digit are skipped
std::vector<std::vector<double>> read_node_csv(const std::string& path, const Grid& grid, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open media table '" + path + "'");
  std::vector<std::vector<double>> out(grid.size());
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])))) continue;
    std::vector<std::string> f = split_list(line);
    if (f.size() != 2 + columns) throw ConfigError("media table '" + path + "': bad row '" + line + "'");
    const int i = std::stoi(f[0]), j = std::stoi(f[1]);
    if (i < 0 || i >= grid.n(0) || j < 0 || j >= (grid.dim() == 2 ? grid.n(1) : 1))
      throw ConfigError("media table '" + path + "': node index out of range in '" + line + "'");
    const std::size_t k = grid.index(i, j);
    out[k].resize(columns);
    for (std::size_t c = 0; c < columns; ++c) out[k][c] = std::stod(f[2 + c]);
    seen[k] = true;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("media table '" + path + "' does not cover every node");
  return out;
}

ReactionProfile scaled(ReactionProfile g, double s) {
  if (s == 1.0) return g;
  auto base = g.g;
  g.g = [base, s](double u) { return s * base(u); };
  g.dg0 *= s;
  g.slope1 *= s;
  g.lipschitz *= s;
  g.name = format_number(s) + " " + g.name;
  return g;
}

std::string class_label(NonlinearityClass c) {
  switch (c) {
    case NonlinearityClass::Combustion: return "combustion";
    case NonlinearityClass::ZFK: return "ZFK";
    case NonlinearityClass::KPP: return "KPP";
  }
  return "unknown";
}

}  // namespace

Media build_media(const Config& cfg) {
  const std::string geometry = cfg.get_string("cell.geometry");
  const long long dim = cfg.get_integer("cell.dim");
  const double Lx = cfg.get_number("cell.period_x");
  CellSpec spec;
  if (geometry == "torus" && dim == 1)
    spec = CellSpec::torus1d(Lx, cfg.get_number("direction.x"));
  else if (geometry == "torus" && dim == 2)
    spec = CellSpec::torus2d(Lx, cfg.get_number("cell.period_y"),
                             {cfg.get_number("direction.x"), cfg.get_number("direction.y")});
  else if (geometry == "cylinder" && dim == 2)
    spec = CellSpec::cylinder(Lx, cfg.get_number("cell.height"), cfg.get_number("direction.x"));
  else
    throw ConfigError("unsupported cell: geometry '" + geometry + "' with dim " + std::to_string(dim));
  std::vector<int> n{static_cast<int>(cfg.get_integer("grid.nx"))};
  if (dim == 2) n.push_back(static_cast<int>(cfg.get_integer("grid.ny")));
  Grid grid(spec, n);
  const bool cyl = spec.geometry == Geometry::Cylinder;
  const double ky = dim == 2 ? (cyl ? std::numbers::pi / spec.cylinder_height : kTwoPi / spec.periods[1]) : 0.0;

  // diffusion
  DiffusionField A;
  const std::string dfam = cfg.get_string("diffusion.family");
  const double axx = cfg.get_number("diffusion.axx"), ayy = cfg.get_number("diffusion.ayy"),
               axy = cfg.get_number("diffusion.axy");
  bool constant_A = false;
  if (dfam == "constant") {
    A = DiffusionField::constant(grid, dim == 2 ? Mat2{axx, axy, axy, ayy} : Mat2{axx, 0.0, 0.0, 0.0});
    constant_A = true;
  } else if (dfam == "modulated") {
    const double mx = cfg.get_number("diffusion.mod_x"), my = cfg.get_number("diffusion.mod_y");
    A = DiffusionField::from_function(grid, [=](const Vec2& p) {
      const double m = (1.0 + mx * std::cos(kTwoPi * p[0] / Lx)) * (1.0 + my * std::cos(ky * p[1]));
      return Mat2::diagonal(axx * m, dim == 2 ? ayy : 0.0);
    });
  } else if (dfam == "csv") {
    const auto rows = read_node_csv(resolve(cfg, cfg.get_string("diffusion.path")), grid, 4);
    std::vector<Mat2> s(grid.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = {rows[k][0], rows[k][1], rows[k][2], rows[k][3]};
    A = DiffusionField::from_samples(std::move(s));
  } else {
    throw ConfigError("unknown diffusion family '" + dfam + "'");
  }

  // advection
  AdvectionField q;
  const std::string afam = cfg.get_string("advection.family");
  const double amp = cfg.get_number("advection.amplitude");
  bool zero_q = false;
  if (afam == "zero") {
    q = AdvectionField::zero(grid);
    zero_q = true;
  } else if (afam == "cellular") {
    if (dim != 2 || cyl) throw ConfigError("cellular flow needs a 2-D torus");
    const double Ly = spec.periods[1];
    q = AdvectionField::rotated_gradient(
        grid, [=](const Vec2& p) { return amp * std::sin(kTwoPi * p[0] / Lx) * std::sin(kTwoPi * p[1] / Ly); });
  } else if (afam == "shear") {
    if (dim != 2) throw ConfigError("shear flow needs a 2-D cell");
    q = AdvectionField::shear(grid, [=](double y) { return amp * std::cos(ky * y); });
  } else if (afam == "linear_x") {
    q = AdvectionField::explicit_field(grid, [=](const Vec2& p) { return Vec2{amp * p[0], 0.0}; });
  } else if (afam == "csv") {
    const auto rows = read_node_csv(resolve(cfg, cfg.get_string("advection.path")), grid, 2);
    VectorField s(grid.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = {rows[k][0], rows[k][1]};
    q = AdvectionField::from_samples(std::move(s));
  } else {
    throw ConfigError("unknown advection family '" + afam + "'");
  }

  // reaction
  const std::string rfam = cfg.get_string("reaction.family");
  ReactionProfile g;
  if (rfam == "fisher")
    g = ReactionProfile::fisher();
  else if (rfam == "ignition")
    g = ReactionProfile::ignition(cfg.get_number("reaction.theta"));
  else if (rfam == "zfk_cubic")
    g = ReactionProfile::zfk_cubic();
  else
    throw ConfigError("unknown reaction family '" + rfam + "'");
  const double scale = cfg.get_number("reaction.scale"), ramp = cfg.get_number("reaction.amplitude");
  const std::string rpath = cfg.get_string("reaction.path");
  const std::string claimed = cfg.get_string("reaction.class");
  Nonlinearity f;
  double mean_rate = scale;
  bool homogeneous = false;
  if (rpath.empty() && ramp == 0.0) {
    const ReactionProfile gs = scaled(g, scale);
    f = claimed.empty() ? make_homogeneous_nonlinearity(grid, gs)
                        : make_homogeneous_nonlinearity(grid, gs, class_from_string(claimed));
    homogeneous = true;
  } else {
    Field h(grid.size());
    if (!rpath.empty()) {
      const auto rows = read_node_csv(resolve(cfg, rpath), grid, 1);
      for (std::size_t k = 0; k < h.size(); ++k) h[k] = rows[k][0];
    } else {
      for (std::size_t k = 0; k < h.size(); ++k) h[k] = scale * (1.0 + ramp * std::sin(kTwoPi * grid.point(k)[0] / Lx));
    }
    f = claimed.empty() ? make_product_nonlinearity(grid, h, g)
                        : make_product_nonlinearity(grid, h, g, class_from_string(claimed));
    double wsum = 0.0;
    mean_rate = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      mean_rate += grid.weight(k) * h[k];
      wsum += grid.weight(k);
    }
    mean_rate /= wsum;
  }
  const ReactionProfile gm = scaled(g, mean_rate);
  Nonlinearity fm = claimed.empty() ? make_homogeneous_nonlinearity(grid, gm)
                                    : make_homogeneous_nonlinearity(grid, gm, class_from_string(claimed));
  const double cut = cfg.get_number("reaction.cutoff");
  if (cut > 0.0) {
    f = regularize_combustion(f, cut);
    fm = regularize_combustion(fm, cut);
  }
  double mean_a = 0.0, wsum = 0.0;
  const Vec2 e = grid.spec().e_tilde();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    mean_a += grid.weight(k) * A.A[k].quadratic(e);
    wsum += grid.weight(k);
  }
  mean_a /= wsum;

  return Media{std::move(grid), std::move(A), std::move(q),  std::move(f),
               constant_A && zero_q && homogeneous, std::move(fm), mean_a};
}

std::shared_ptr<const Profile> mean_planar_profile(const Media& m) {
  return solve_planar_front(m.mean_source, m.mean_a).profile;
}

StripDomain build_strip(const Config& cfg, const Media& m) {
  return StripDomain::make(m.grid, static_cast<int>(cfg.get_integer("sim.periods")), cfg.get_bool("sim.clamped"));
}

SimOptions build_sim_options(const Config& cfg, const Media& m) {
  SimOptions o;
  o.dt = cfg.get_number("sim.dt");
  o.t_burn = cfg.get_number("sim.t_burn");
  o.t_fit = cfg.get_number("sim.t_fit");
  o.sample_every = cfg.get_number("sim.sample_every");
  o.amplitude = cfg.get_number("sim.amplitude");
  o.snapshot_every = cfg.get_number("sim.snapshot_every");
  o.snapshot_from = cfg.get_number("sim.snapshot_from");
  const std::string init = cfg.get_string("sim.initial");
  if (init == "heaviside") {
    o.initial = InitialKind::Heaviside;
  } else if (init == "planar") {
    o.initial = InitialKind::PlanarSeed;
    o.seed = mean_planar_profile(m);
  } else {
    throw ConfigError("unknown initial datum '" + init + "'");
  }
  return o;
}

BoundOptions build_bound_options(const Config& cfg, const Media& m) {
  BoundOptions o;
  std::string fam = cfg.get_string("bounds.family");
  if (fam == "auto")
    fam = m.f.cls() == NonlinearityClass::Combustion ? "planar_profile" : "exp_sigmoid";
  if (fam == "exp_sigmoid") {
    o.family = Family::ExpSigmoid;
  } else if (fam == "planar_profile") {
    o.family = Family::PlanarProfile;
    o.profile = mean_planar_profile(m);
  } else {
    throw ConfigError("unknown bound family '" + fam + "'");
  }
  o.cut = static_cast<int>(cfg.get_integer("bounds.cut"));
  o.sweeps = static_cast<int>(cfg.get_integer("bounds.sweeps"));
  o.lambda0 = cfg.get_number("bounds.lambda0");
  o.lambda_prescan = cfg.get_bool("bounds.prescan");
  o.delta0 = cfg.get_number("bounds.delta0");
  o.golden_iters = static_cast<int>(cfg.get_integer("bounds.golden_iters"));
  o.restarts = static_cast<int>(cfg.get_integer("bounds.restarts"));
  o.seed = static_cast<std::uint64_t>(cfg.get_integer("seed"));
  o.reval.s_samples = static_cast<int>(cfg.get_integer("bounds.s_samples"));
  return o;
}

KppOptions build_kpp_options(const Config& cfg) {
  KppOptions o;
  o.upwind = cfg.get_bool("eigen.upwind");
  o.lambda_start = cfg.get_number("eigen.lambda_start");
  o.eigen.tol = cfg.get_number("eigen.tol");
  return o;
}

// ---------------------------------------------------------------- speed

nlohmann::json RouteRecord::to_json() const {
  nlohmann::json j;
  j["route"] = to_string(estimate.route);
  j["status"] = estimate.status;
  j["value"] = std::isfinite(estimate.value) ? estimate.value : 0.0;
  j["uncertainty"] = std::isfinite(estimate.uncertainty) ? estimate.uncertainty : 0.0;
  j["detail"] = estimate.detail.is_object() ? estimate.detail : nlohmann::json::object();
  j["wall_time_s"] = wall_time_s;
  return j;
}

bool SpeedRun::any_ok() const {
  for (const auto& r : records)
    if (r.estimate.ok()) return true;
  return false;
}

bool SpeedRun::ordered() const {
  for (const auto& f : report.flags)
    if (f.rule.find("<=") != std::string::npos) return false;
  return true;
}

nlohmann::json SpeedRun::to_json() const {
  nlohmann::json j;
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) j["records"].push_back(r.to_json());
  j["consistency"] = report.to_json();
  return j;
}

std::vector<Route> parse_routes(const std::string& list) {
  std::vector<Route> out;
  for (const auto& s : split_list(list)) {
    try {
      out.push_back(route_from_string(s));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<Route> routes_from_config(const Config& cfg) { return parse_routes(cfg.get_string("routes")); }

namespace {

SpeedEstimate run_route(Route r, const Config& cfg, const Media& m, const RunHooks& hooks) {
  switch (r) {
    case Route::Eigenvalue:
      return minimal_speed_kpp(m.grid, m.A, m.q, m.f, build_kpp_options(cfg)).estimate;
    case Route::UpperBound:
    case Route::LowerBound: {
      if (r == Route::LowerBound && m.f.cls() != NonlinearityClass::Combustion)
        throw ClassError("max-min undefined for " + class_label(m.f.cls()));
      BoundOptions o = build_bound_options(cfg, m);
      if (r == Route::UpperBound && o.family == Family::ExpSigmoid && cfg.get_bool("bounds.warm_start") &&
          m.f.cls() == NonlinearityClass::KPP && m.f.min_zeta() > 0.0) {
        const KppSpeed ks = minimal_speed_kpp(m.grid, m.A, m.q, m.f, build_kpp_options(cfg));
        o.lambda0 = ks.lambda_star;
        o.coeffs0 = project_log_psi(m.grid, PhaseBasis(m.grid, o.cut), ks.pair.psi);
      }
      std::ofstream traj;
      if (!hooks.trajectory_dir.empty()) {
        traj.open((std::filesystem::path(hooks.trajectory_dir) / ("trajectory_" + to_string(r) + ".csv")).string());
        if (traj) o.trajectory = &traj;
      }
      return (r == Route::UpperBound ? upper_bound_minmax(m.grid, m.A, m.q, m.f, o)
                                     : lower_bound_maxmin(m.grid, m.A, m.q, m.f, o))
          .estimate;
    }
    case Route::Simulation:
      return measure_front_speed(build_strip(cfg, m), m.A, m.q, m.f, build_sim_options(cfg, m));
  }
  throw std::logic_error("unhandled route");
}

}  // namespace

SpeedRun run_speed(const Config& cfg, const std::vector<Route>& routes, const RunHooks& hooks) {
  const Media m = build_media(cfg);
  const bool timed = cfg.get_bool("output.wall_time");
  SpeedRun run;
  std::vector<SpeedEstimate> estimates;
  for (Route r : routes) {
    if (hooks.log) *hooks.log << "route " << to_string(r) << " ..." << std::endl;
    const auto t0 = std::chrono::steady_clock::now();
    SpeedEstimate e;
    try {
      e = run_route(r, cfg, m, hooks);
    } catch (const ClassError& ex) {
      e = SpeedEstimate{};
      e.status = std::string("refused: ") + ex.what();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      e = SpeedEstimate{};
      e.status = std::string("error: ") + ex.what();
    }
    e.route = r;
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (hooks.log) *hooks.log << "route " << to_string(r) << " " << e.status << " " << e.value << std::endl;
    run.records.push_back({e, timed ? dt : 0.0});
    estimates.push_back(e);
  }
  run.report = speed_report(estimates);
  return run;
}

// ---------------------------------------------------------------- sweep

void SweepTable::write_csv(std::ostream& os) const {
  os << "value";
  for (Route r : routes) os << "," << to_string(r) << "," << to_string(r) << "_uncertainty";
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << values[i];
    for (const auto& e : rows[i]) {
      if (e.ok())
        os << "," << e.value << "," << e.uncertainty;
      else
        os << ",nan,nan";
    }
    os << "\n";
  }
}

void SweepTable::write_route_csv(std::ostream& os, std::size_t route_index) const {
  os << "value,speed\n";
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& e = rows[i][route_index];
    if (e.ok()) os << values[i] << "," << e.value << "\n";
  }
}

SweepTable run_sweep(const Config& cfg, const std::string& key, const std::vector<std::string>& values,
                     const std::vector<Route>& routes, unsigned threads) {
  const KeySpec* k = find_key(key);
  if (!k) throw ConfigError("sweep: unknown key '" + key + "'");
  if (k->type != KeyType::Number && k->type != KeyType::Integer)
    throw ConfigError("sweep: key '" + key + "' is not numeric");
  std::vector<Config> cfgs;
  for (const auto& v : values) {
    Config c = cfg;
    c.set(key, v);
    cfgs.push_back(std::move(c));
  }
  SweepTable table;
  table.key = key;
  table.routes = routes;
  table.values = values;
  table.rows.resize(values.size());
  if (values.empty()) return table;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        SpeedRun run = run_speed(cfgs[i], routes);
        for (auto& r : run.records) table.rows[i].push_back(std::move(r.estimate));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return table;
}

}  // namespace pulsefront
