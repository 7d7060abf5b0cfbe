#include "pulsefront/principal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

void check_sign_structure(const SparseMatrix& M) {
  for (Eigen::Index r = 0; r < M.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(M, r); it; ++it)
      if (it.col() != r && it.value() < 0.0) {
        std::ostringstream os;
        os << "principal_eigenpair: negative off-diagonal entry " << it.value() << " at (" << r << ", " << it.col()
           << "); assemble with upwinding and diagonal diffusion";
        throw std::invalid_argument(os.str());
      }
}

double gershgorin_shift(const SparseMatrix& M) {
  double s = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < M.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(M, r); it; ++it) row += it.col() == r ? it.value() : std::abs(it.value());
    s = std::max(s, row);
  }
  return 1.0 + s;
}

}  // namespace

EigenPair principal_eigenpair(const OperatorMatrix& op, const EigenOptions& opts, const Field* start) {
  const SparseMatrix& M = op.M;
  const Eigen::Index n = M.rows();
  if (n == 0 || M.cols() != n) throw std::invalid_argument("principal_eigenpair: matrix must be square");
  check_sign_structure(M);
  const double sigma_g = gershgorin_shift(M);

  Eigen::VectorXd psi(n);
  if (start && static_cast<Eigen::Index>(start->size()) == n &&
      std::all_of(start->begin(), start->end(), [](double v) { return v > 0.0; })) {
    for (Eigen::Index i = 0; i < n; ++i) psi[i] = (*start)[static_cast<std::size_t>(i)];
  } else {
    psi.setOnes();
  }
  psi /= psi.maxCoeff();

  ColMatrix Mc = M;
  ColMatrix I(n, n);
  I.setIdentity();
  Eigen::SparseLU<ColMatrix> lu;
  bool analyzed = false;
  double factored_sigma = std::numeric_limits<double>::quiet_NaN();

  EigenPair out;
  out.lambda = op.lambda;
  double lb = 0.0, ub = 0.0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const Eigen::VectorXd w = M * psi;
    lb = std::numeric_limits<double>::infinity();
    ub = -lb;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = w[i] / psi[i];
      lb = std::min(lb, r);
      ub = std::max(ub, r);
    }
    const double scale = std::max(1.0, std::abs(ub));
    if (ub - lb <= 2.0 * opts.tol * scale) {
      out.k = 0.5 * (ub + lb);
      out.iterations = it;
      out.residual = (w - out.k * psi).lpNorm<Eigen::Infinity>();
      out.psi.assign(psi.data(), psi.data() + n);
      return out;
    }
    if (it == opts.max_iter) break;

    const double sigma = std::min(sigma_g, ub + std::max(ub - lb, 1e-8 * scale));
    if (!(sigma == factored_sigma)) {
      ColMatrix S = sigma * I - Mc;
      if (!analyzed) {
        lu.analyzePattern(S);
        analyzed = true;
      }
      lu.factorize(S);
      if (lu.info() != Eigen::Success) throw NoConvergence("principal_eigenpair: shifted factorization failed", ub - lb);
      factored_sigma = sigma;
    }
    Eigen::VectorXd next = lu.solve(psi);
    if (lu.info() != Eigen::Success || !(next.minCoeff() > 0.0)) {
      // loss of positivity from the near-singular shift: fall back to the safe one
      ColMatrix S = sigma_g * I - Mc;
      lu.factorize(S);
      factored_sigma = sigma_g;
      next = lu.solve(psi);
      if (!(next.minCoeff() > 0.0)) throw NoConvergence("principal_eigenpair: iterate lost positivity", ub - lb);
    }
    psi = next / next.maxCoeff();
  }
  std::ostringstream os;
  os << "principal_eigenpair: no convergence after " << opts.max_iter << " iterations at lambda = " << op.lambda;
  throw NoConvergence(os.str(), ub - lb);
}

std::vector<EigenPair> k_curve(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Field& zeta,
                               const std::vector<double>& lambdas, const EigenOptions& opts, bool upwind) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw std::invalid_argument("k_curve: lambdas must be sorted");
  std::vector<EigenPair> out;
  out.reserve(lambdas.size());
  const Field* warm = nullptr;
  for (double lam : lambdas) {
    if (lam < 0.0) throw std::invalid_argument("k_curve: lambdas must be non-negative");
    const OperatorMatrix M = assemble_Llambda(grid, A, q, zeta, lam, upwind);
    try {
      out.push_back(principal_eigenpair(M, opts, warm));
    } catch (const NoConvergence& e) {
      std::ostringstream os;
      os << e.what() << " (k_curve at lambda = " << lam << ")";
      throw NoConvergence(os.str(), e.residual());
    }
    warm = &out.back().psi;
  }
  return out;
}

}  // namespace pulsefront
