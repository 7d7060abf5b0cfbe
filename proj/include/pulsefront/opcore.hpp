#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pulsefront/cell.hpp"
#include "pulsefront/media.hpp"
#include "pulsefront/testfunction.hpp"

namespace pulsefront {

struct OperatorMatrix {
  SparseMatrix M;
  double lambda = 0.0;
  bool upwind = true;
  Geometry geometry = Geometry::Torus;
};

/// div(A grad psi) + (q + 2 lambda A e) . grad psi
///   + (lambda^2 eAe + lambda div(A e) + lambda q.e + zeta) psi
OperatorMatrix assemble_Llambda(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Field& zeta,
                                double lambda, bool upwind = true);

/// Node-wise coefficient data used by the front operator: A, its row
/// divergence, div(A e), q and a = eAe. Media derivatives are taken by
/// trigonometric differentiation on periodic axes.
struct CoefficientJets {
  std::vector<Mat2> A;
  VectorField divA;
  Field divAe;
  VectorField q;
  Field a;
  Vec2 e{1.0, 0.0};

  static CoefficientJets build(const Grid& grid, const DiffusionField& A, const AdvectionField& q);
  std::size_t size() const { return A.size(); }
};

/// F[phi] = div(A grad phi) + a phi_ss + div(A e phi_s) + d_s(e . A grad phi).
double front_form(const CoefficientJets& coef, std::size_t node, const FrontJet& jet);

/// L phi = F[phi] + q . grad phi + (q.e - c) phi_s.
double apply_front_operator(const CoefficientJets& coef, std::size_t node, double c, const FrontJet& jet);

/// The field L phi at one s over all nodes.
Field apply_front_operator(const CoefficientJets& coef, double c, const TestFunction& phi, double s);

struct REvalOptions {
  int s_samples = 257;
  std::optional<std::pair<double, double>> window;
  int refine_passes = 2;
  bool store_values = false;
  double admissibility_floor = 1e-14;
};

struct RFieldSample {
  std::vector<double> s;
  std::vector<double> values;  // row-major (s index, node), when stored
  Field tail_minus;            // R(-inf, x)
  Field tail_plus;             // R(+inf, x)
  bool tails_analytic = true;
  bool limits_checked_on_window_only = false;
  double sup = 0.0;
  double inf = 0.0;
  double sup_s = 0.0;
  std::size_t sup_node = 0;
  int sup_where = 0;  // -1 tail at -inf, 0 interior, +1 tail at +inf
  double inf_s = 0.0;
  std::size_t inf_node = 0;
  int inf_where = 0;
  double sup_lattice = 0.0;  // before refinement and tails
  double inf_lattice = 0.0;
  double eprime_ratio = 0.0;  // sampled sup |phi_ss| / phi_s
  std::size_t nodes = 0;

  double at(std::size_t si, std::size_t node) const { return values[si * nodes + node]; }
};

/// R phi = (F[phi] + q . grad phi + f) / phi_s + q.e over an s-lattice and
/// all nodes, plus tail limits.
RFieldSample evaluate_R(const Grid& grid, const CoefficientJets& coef, const Nonlinearity& f, const TestFunction& phi,
                        const REvalOptions& opts = {});
RFieldSample evaluate_R(const Grid& grid, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                        const TestFunction& phi, const REvalOptions& opts = {});

/// R phi at one sample.
double R_value(const CoefficientJets& coef, const Nonlinearity& f, const TestFunction& phi, double s, std::size_t node);

}  // namespace pulsefront
