#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "pulsefront/kpp_speed.hpp"
#include "pulsefront/opcore.hpp"
#include "pulsefront/planar_front.hpp"
#include "pulsefront/principal.hpp"
#include "pulsefront/testfunction.hpp"

namespace pulsefront {

/// phi = r / (1 + r), r = psi(x) e^{lambda (s + tau)}, log psi given by Fourier coefficients.
TestFunction make_exp_sigmoid(const Grid& grid, double lambda, const PhaseBasis& basis,
                              const std::vector<double>& log_psi_coeffs, double tau = 0.0);

/// phi = V(lambda (s + tau) + Lambda(x)) for a tabulated planar profile V.
TestFunction make_planar_profile(const Grid& grid, std::shared_ptr<const Profile> profile, double lambda,
                                 const PhaseBasis& basis, const std::vector<double>& coeffs, double tau = 0.0);

/// Fourier coefficients of log psi.
std::vector<double> project_log_psi(const Grid& grid, const PhaseBasis& basis, const Field& psi);

struct BoundOptions {
  Family family = Family::ExpSigmoid;
  std::shared_ptr<const Profile> profile;  // required for PlanarProfile
  int cut = 4;
  int sweeps = 3;
  double lambda0 = 1.0;
  std::vector<double> coeffs0;  // initial log psi coefficients; empty means psi = 1
  bool optimize_lambda = true;
  bool optimize_coeffs = true;
  bool lambda_prescan = true;      // golden search in log lambda before the sweeps
  double lambda_scan_width = 3.0;  // half-width of that search in log lambda
  double delta0 = 0.5;             // initial half-range per coordinate
  int golden_iters = 16;
  int restarts = 0;
  std::uint64_t seed = 1;
  REvalOptions reval;
  std::ostream* trajectory = nullptr;  // CSV: evaluation, bound, lambda, coefficients
};

struct BoundResult {
  SpeedEstimate estimate;
  double lambda = 1.0;
  std::vector<double> coeffs;
  PhaseBasis basis;
  TestFunction phi;
  RFieldSample best;
  int evaluations = 0;
  int rejected = 0;
  std::vector<double> history;  // bound after the start and after every sweep
  std::vector<std::pair<double, double>> encountered;  // (sup R, inf R) at every admissible evaluation
};

/// Upper bound: minimizes sup R phi over the family by cyclic coordinate
/// descent with golden-section line searches.
BoundResult upper_bound_minmax(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                               const Nonlinearity& f, const BoundOptions& opts = {});

/// Lower bound for combustion sources: maximizes inf R phi.
BoundResult lower_bound_maxmin(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                               const Nonlinearity& f, const BoundOptions& opts = {});

struct TailCheck {
  double k_over_lambda = 0.0;
  double max_tail_deviation = 0.0;  // max_x |R(-inf, x) - k / lambda|
  double discrete_projection_residual = 0.0;  // max_x |(M psi_K)/(lambda psi_K) - k / lambda|
  double log_projection_error = 0.0;          // max_x |log psi - Lambda_K - mean offset|
  double sup_R = 0.0;
  RFieldSample sample;
};

/// Exponential-sigmoid test function built from the projected eigenfunction
/// at lambda, compared against k(lambda) / lambda.
TailCheck tail_limit_check(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                           const EigenPair& pair, const OperatorMatrix& M, int cut, const REvalOptions& opts = {});

}  // namespace pulsefront
