#pragma once

#include <vector>

#include "pulsefront/media.hpp"
#include "pulsefront/opcore.hpp"

namespace pulsefront {

struct EigenPair {
  double lambda = 0.0;
  double k = 0.0;
  Field psi;  // strictly positive, max psi = 1
  double residual = 0.0;
  int iterations = 0;
};

struct EigenOptions {
  /// Target on the Collatz-Wielandt enclosure width, relative to max(1, |k|).
  double tol = 1e-9;
  int max_iter = 10000;
};

/// Perron pair of a matrix with non-negative off-diagonal entries by shifted
/// inverse iteration. The shift is the Collatz-Wielandt upper bound plus
/// the current enclosure width, capped by the Gershgorin bound.
EigenPair principal_eigenpair(const OperatorMatrix& M, const EigenOptions& opts = {}, const Field* start = nullptr);

/// Eigenpairs along a sorted list of lambdas, each warm-started from the
/// previous eigenfunction.
std::vector<EigenPair> k_curve(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Field& zeta,
                               const std::vector<double>& lambdas, const EigenOptions& opts = {}, bool upwind = true);

}  // namespace pulsefront
