#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "pulsefront/principal.hpp"

namespace pulsefront {

enum class Route { Eigenvalue, UpperBound, LowerBound, Simulation };
std::string to_string(Route r);
Route route_from_string(const std::string& s);

struct SpeedEstimate {
  Route route = Route::Eigenvalue;
  double value = 0.0;
  double uncertainty = 0.0;
  std::string status = "ok";
  nlohmann::json detail = nlohmann::json::object();

  bool ok() const { return status == "ok"; }
};

struct KppOptions {
  bool upwind = true;
  double lambda_tol = 1e-6;  // relative width of the final golden-section interval
  double lambda_start = 1.0;
  bool scan_backstop = true;
  int scan_points = 33;
  EigenOptions eigen;
};

struct KppSpeed {
  SpeedEstimate estimate;
  double lambda_star = 0.0;
  EigenPair pair;
  std::array<double, 3> bracket{};    // lambdas of the V-pattern
  std::array<double, 3> g_bracket{};  // k / lambda at the bracket
  int eigen_solves = 0;
  bool scan_restarted = false;
};

/// c* = min over lambda > 0 of k(lambda) / lambda.
KppSpeed minimal_speed_kpp(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                           const KppOptions& opts = {});

struct ConsistencyFlag {
  std::string rule;
  std::string message;
};

struct ConsistencyReport {
  std::vector<SpeedEstimate> rows;
  std::vector<ConsistencyFlag> flags;

  bool consistent() const { return flags.empty(); }
  bool empty() const { return rows.empty(); }
  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Cross-route table with ordering checks (lower <= simulation <= upper,
/// eigenvalue <= upper) and a relative gap tolerance between the eigenvalue
/// route and the optimized upper bound.
ConsistencyReport speed_report(const std::vector<SpeedEstimate>& estimates, double gap_tol = 0.03);

}  // namespace pulsefront
