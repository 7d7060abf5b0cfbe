#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pulsefront/config.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/experiment.hpp"
#include "pulsefront/planar_front.hpp"

using namespace pulsefront;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::string out;
  std::string routes;
  long long seed = -1;
  bool verbose = false;
};

Config load(const Common& c) {
  Config cfg = Config::load(c.config);
  if (!c.out.empty()) cfg.set("output.dir", c.out);
  if (!c.routes.empty()) cfg.set("routes", c.routes);
  if (c.seed >= 0) cfg.set("seed", std::to_string(c.seed));
  return cfg;
}

fs::path out_dir(const Config& cfg) {
  fs::path d = cfg.get_string("output.dir");
  fs::create_directories(d);
  return d;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw std::ios_base::failure("cannot write '" + p.string() + "'");
  return os;
}

int cmd_validate(const Common& c) {
  const Config cfg = load(c);
  const Media m = build_media(cfg);
  const ValidationReport rep = validate_media(m.grid, m.A, m.q, m.f);
  std::cout << rep.to_text();
  return rep.passed() ? kOk : kFailed;
}

int cmd_speed(const Common& c) {
  const Config cfg = load(c);
  const Media m = build_media(cfg);
  const ValidationReport rep = validate_media(m.grid, m.A, m.q, m.f);
  if (!rep.passed()) {
    std::cout << rep.to_text();
    return kFailed;
  }
  const fs::path dir = out_dir(cfg);
  RunHooks hooks;
  if (c.verbose) {
    hooks.log = &std::cerr;
    hooks.trajectory_dir = dir.string();
  }
  const SpeedRun run = run_speed(cfg, routes_from_config(cfg), hooks);
  auto os = open_out(dir / "speed.json");
  os << run.to_json().dump(2) << "\n";
  std::cout << run.report.to_text();
  return run.any_ok() && run.ordered() ? kOk : kFailed;
}

int cmd_sweep(const Common& c, const std::string& key, const std::string& values) {
  const Config cfg = load(c);
  const fs::path dir = out_dir(cfg);
  const std::vector<Route> routes = routes_from_config(cfg);
  const SweepTable table = run_sweep(cfg, key, split_list(values), routes);
  {
    auto os = open_out(dir / "sweep.csv");
    table.write_csv(os);
  }
  for (std::size_t r = 0; r < routes.size(); ++r) {
    auto os = open_out(dir / ("sweep_" + to_string(routes[r]) + ".csv"));
    table.write_route_csv(os, r);
  }
  table.write_csv(std::cout);
  return kOk;
}

int cmd_simulate(const Common& c) {
  const Config cfg = load(c);
  const Media m = build_media(cfg);
  const fs::path dir = out_dir(cfg);
  const StripDomain dom = build_strip(cfg, m);
  const SimOptions opts = build_sim_options(cfg, m);
  SimRun run;
  try {
    run = run_front_simulation(dom, m.A, m.q, m.f, opts);
  } catch (const NoFrontError& e) {
    std::cout << "no front: " << e.what() << "\n";
    return kFailed;
  }
  {
    auto os = open_out(dir / "timeseries.csv");
    write_time_series_csv(os, run.series);
  }
  const bool binary = cfg.get_string("sim.snapshot_format") != "csv";
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(5) << std::setfill('0') << k << (binary ? ".bin" : ".csv");
    std::ofstream os(dir / name.str(), binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::ios_base::failure("cannot write snapshot");
    if (binary)
      write_snapshot_binary(os, dom, run.snapshots[k]);
    else
      write_snapshot_csv(os, dom, run.snapshots[k]);
  }
  RouteRecord rec{run.estimate, 0.0};
  auto os = open_out(dir / "simulation.json");
  os << rec.to_json().dump(2) << "\n";
  std::cout << "simulation " << run.estimate.value << " +- " << run.estimate.uncertainty << "\n";
  return kOk;
}

int cmd_profile(const Common& c) {
  const Config cfg = load(c);
  const Media m = build_media(cfg);
  const fs::path dir = out_dir(cfg);
  PlanarFront pf;
  try {
    pf = solve_planar_front(m.f, m.A.A[0].xx);
  } catch (const ClassError& e) {
    std::cout << "refused: " << e.what() << "\n";
    return kFailed;
  }
  {
    auto os = open_out(dir / "profile.csv");
    os << "xi,V,V_prime\n";
    os.precision(17);
    const auto& v = pf.profile->values();
    const auto& v1 = pf.profile->slopes();
    for (std::size_t k = 0; k < v.size(); ++k)
      os << pf.profile->z0() + pf.profile->h() * static_cast<double>(k) << "," << v[k] << "," << v1[k] << "\n";
  }
  nlohmann::json j = {{"c0", pf.c0}, {"a", pf.a}, {"mu", pf.mu}, {"mismatch", pf.mismatch},
                      {"bisection_steps", pf.bisection_steps}};
  auto os = open_out(dir / "profile.json");
  os << j.dump(2) << "\n";
  std::cout << "c0 " << std::setprecision(12) << pf.c0 << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speeds of pulsating fronts in periodic reaction-advection-diffusion media"};
  app.require_subcommand(1);
  Common common;
  std::string sweep_key, sweep_values;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "config file")->required();
    sub->add_option("--out", common.out, "output directory (overrides output.dir)");
    sub->add_option("--routes", common.routes, "comma-separated routes (overrides routes)");
    sub->add_option("--seed", common.seed, "optimizer seed (overrides seed)");
    sub->add_flag("--verbose", common.verbose, "progress on stderr, optimizer trajectories");
  };
  auto* validate = app.add_subcommand("validate", "check the media hypotheses");
  auto* speed = app.add_subcommand("speed", "speed estimates for the selected routes");
  auto* sweep = app.add_subcommand("sweep", "speed estimates over values of one numeric key");
  auto* simulate = app.add_subcommand("simulate", "front simulation time series");
  auto* profile = app.add_subcommand("profile", "planar front of a homogeneous combustion source");
  for (auto* s : {validate, speed, sweep, simulate, profile}) add_common(s);
  sweep->add_option("--key", sweep_key, "config key to vary")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(common);
    if (*speed) return cmd_speed(common);
    if (*sweep) return cmd_sweep(common, sweep_key, sweep_values);
    if (*simulate) return cmd_simulate(common);
    if (*profile) return cmd_profile(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
