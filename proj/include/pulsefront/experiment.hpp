#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulsefront/bounds.hpp"
#include "pulsefront/config.hpp"
#include "pulsefront/frontsim.hpp"
#include "pulsefront/kpp_speed.hpp"
#include "pulsefront/media.hpp"

namespace pulsefront {

struct Media {
  Grid grid;
  DiffusionField A;
  AdvectionField q;
  Nonlinearity f;
  bool constant_coefficients = false;  // A constant, q = 0, f homogeneous
  // homogeneous source with the cell-mean rate, and the cell mean of e.A e;
  // their planar front seeds simulations and the planar-profile bound family
  Nonlinearity mean_source;
  double mean_a = 1.0;
};

/// Planar front of the homogenized medium (mean_source, mean_a).
std::shared_ptr<const Profile> mean_planar_profile(const Media& m);

/// Builds grid and media from the config. CSV paths are resolved against
/// the config's directory; unreadable files raise std::ios_base::failure.
Media build_media(const Config& cfg);

StripDomain build_strip(const Config& cfg, const Media& m);
SimOptions build_sim_options(const Config& cfg, const Media& m);
BoundOptions build_bound_options(const Config& cfg, const Media& m);
KppOptions build_kpp_options(const Config& cfg);

struct RouteRecord {
  SpeedEstimate estimate;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
};

struct SpeedRun {
  std::vector<RouteRecord> records;
  ConsistencyReport report;

  bool any_ok() const;
  /// No ordering rule (lower <= simulation <= upper, eigenvalue <= upper) is violated.
  bool ordered() const;
  nlohmann::json to_json() const;
};

struct RunHooks {
  std::ostream* log = nullptr;             // progress lines
  std::string trajectory_dir;              // optimizer trajectories, when non-empty
};

/// Runs the selected routes. Failures are recorded per route in `status`:
/// "refused: ..." when the formula does not apply to the source class,
/// "error: ..." otherwise.
SpeedRun run_speed(const Config& cfg, const std::vector<Route>& routes, const RunHooks& hooks = {});
std::vector<Route> routes_from_config(const Config& cfg);
std::vector<Route> parse_routes(const std::string& list);

struct SweepTable {
  std::string key;
  std::vector<Route> routes;
  std::vector<std::string> values;
  std::vector<std::vector<SpeedEstimate>> rows;  // rows[value][route]

  void write_csv(std::ostream& os) const;
  /// value,speed for the successful entries of one route.
  void write_route_csv(std::ostream& os, std::size_t route_index) const;
};

/// One speed run per value of `key`, dispatched on up to `threads` workers.
/// Throws ConfigError if the key is unknown or not numeric.
SweepTable run_sweep(const Config& cfg, const std::string& key, const std::vector<std::string>& values,
                     const std::vector<Route>& routes, unsigned threads = 0);

}  // namespace pulsefront
