#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulsefront/cell.hpp"

namespace pulsefront {

/// Value and derivatives of a test function at one (s, node) sample.
struct FrontJet {
  double phi = 0.0;
  double phi_s = 0.0;
  double phi_ss = 0.0;
  Vec2 grad{0.0, 0.0};    // spatial gradient
  Vec2 grad_s{0.0, 0.0};  // spatial gradient of phi_s
  Mat2 hess{};            // spatial Hessian
};

/// Monotone increasing profile P(z) with P(-inf) = 0 and P(+inf) = 1.
class Profile {
 public:
  virtual ~Profile() = default;
  /// P, P', P'' at z.
  virtual void eval(double z, double& p, double& p1, double& p2) const = 0;
  /// Exponential decay rates: P ~ e^{nu_left z} at -inf, 1 - P ~ e^{-nu_right z} at +inf.
  virtual double nu_left() const = 0;
  virtual double nu_right() const = 0;
  /// z-range outside which P or 1 - P is below 1e-6 (sampling window).
  virtual std::pair<double, double> window() const = 0;
  /// sup |P''| / P'.
  virtual double ratio_bound() const = 0;
  virtual std::string name() const = 0;
};

/// P(z) = 1 / (1 + e^{-z}).
class LogisticProfile final : public Profile {
 public:
  void eval(double z, double& p, double& p1, double& p2) const override;
  double nu_left() const override { return 1.0; }
  double nu_right() const override { return 1.0; }
  std::pair<double, double> window() const override { return {-12.0, 12.0}; }
  double ratio_bound() const override { return 1.0; }
  std::string name() const override { return "logistic"; }
};

/// Tabulated profile on a uniform z-lattice with V, V', V'' at the nodes;
/// piecewise cubic Hermite inside, exponential tails outside.
class TabulatedProfile final : public Profile {
 public:
  TabulatedProfile(double z0, double h, std::vector<double> v, std::vector<double> v1, std::vector<double> v2,
                   double nu_left, double nu_right);

  void eval(double z, double& p, double& p1, double& p2) const override;
  double nu_left() const override { return nu_left_; }
  double nu_right() const override { return nu_right_; }
  std::pair<double, double> window() const override { return window_; }
  double ratio_bound() const override { return ratio_bound_; }
  std::string name() const override { return "tabulated"; }

  double z0() const { return z0_; }
  double h() const { return h_; }
  std::size_t size() const { return v_.size(); }
  const std::vector<double>& values() const { return v_; }
  const std::vector<double>& slopes() const { return v1_; }

 private:
  double z0_, h_;
  std::vector<double> v_, v1_, v2_;
  double nu_left_, nu_right_;
  std::pair<double, double> window_;
  double ratio_bound_ = 0.0;
};

/// Fourier mode on the cell. Torus: trig(2 pi (kx x / Lx + ky y / Ly));
/// cylinder: cos(pi ky y / H) trig(2 pi kx x / L).
struct PhaseMode {
  int kx = 0;
  int ky = 0;
  bool sine = false;
};

/// Real Fourier basis for log psi with mode cut K per axis (constant mode
/// excluded: it is equivalent to a shift in s).
class PhaseBasis {
 public:
  PhaseBasis() = default;
  PhaseBasis(const Grid& grid, int cut);

  int cut() const { return cut_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<PhaseMode>& modes() const { return modes_; }
  int find(const PhaseMode& m) const;

  /// Mode value, gradient and Hessian at a point of the cell.
  void eval(std::size_t mode, const Vec2& x, double& v, Vec2& g, Mat2& h) const;

 private:
  std::vector<PhaseMode> modes_;
  int cut_ = 0;
  int dim_ = 1;
  Geometry geometry_ = Geometry::Torus;
  std::array<double, 2> lengths_{1.0, 1.0};
};

/// Node samples of Lambda = log psi with its exact derivatives.
struct SpatialPhase {
  Field value;
  VectorField grad;
  std::vector<Mat2> hess;

  static SpatialPhase zero(std::size_t nodes);
  static SpatialPhase build(const Grid& grid, const PhaseBasis& basis, const std::vector<double>& coeffs);
  double min() const;
  double max() const;
};

/// Weighted least-squares (discretely orthogonal) projection of a nodal
/// field onto the basis.
std::vector<double> project_onto(const Grid& grid, const PhaseBasis& basis, const Field& values);

/// Coefficients of `from` re-expressed in `to`; modes missing in `to` are dropped.
std::vector<double> embed_coefficients(const PhaseBasis& from, const std::vector<double>& coeffs,
                                       const PhaseBasis& to);

enum class Family { ExpSigmoid, PlanarProfile, Explicit };
std::string to_string(Family f);

using ExplicitJetFn = std::function<FrontJet(double s, std::size_t node)>;

/// Admissible test function phi(s, x). Structured families have the form
/// phi = P(lambda (s + tau) + Lambda(x)).
class TestFunction {
 public:
  static TestFunction structured(Family family, std::shared_ptr<const Profile> profile, double lambda,
                                 SpatialPhase phase, double tau = 0.0);
  static TestFunction explicit_jets(ExplicitJetFn fn, std::size_t nodes, double s_lo, double s_hi,
                                    double lambda_ref);

  Family family() const { return family_; }
  bool analytic_tails() const { return family_ != Family::Explicit; }
  FrontJet jet(double s, std::size_t node) const;

  double lambda() const { return lambda_; }
  double tau() const { return tau_; }
  const Profile* profile() const { return profile_.get(); }
  const SpatialPhase& phase() const { return phase_; }
  std::size_t nodes() const { return nodes_; }

  /// Default sampling window [lo, hi] in s.
  std::pair<double, double> default_window() const;
  /// Same function translated: phi(s + dtau).
  TestFunction shifted(double dtau) const;

  /// C with |phi_ss| <= C phi_s (membership in the smaller class), when known.
  std::optional<double> eprime_constant;

 private:
  Family family_ = Family::ExpSigmoid;
  std::shared_ptr<const Profile> profile_;
  double lambda_ = 1.0;
  double tau_ = 0.0;
  SpatialPhase phase_;
  std::size_t nodes_ = 0;
  ExplicitJetFn fn_;
  double s_lo_ = 0.0, s_hi_ = 0.0;
};

}  // namespace pulsefront
