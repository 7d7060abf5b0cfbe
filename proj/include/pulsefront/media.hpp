#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pulsefront/cell.hpp"

namespace pulsefront {

/// Symmetric diffusion tensor sampled at the cell nodes.
struct DiffusionField {
  std::vector<Mat2> A;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static DiffusionField constant(const Grid& grid, const Mat2& value);
  static DiffusionField from_function(const Grid& grid, const std::function<Mat2(const Vec2&)>& fn);
  static DiffusionField from_samples(std::vector<Mat2> samples);

  /// Ellipticity bounds over 16 unit test vectors on every node.
  void update_bounds();
  const Mat2& operator[](std::size_t i) const { return A[i]; }
};

enum class AdvectionKind { Zero, RotatedGradient, Shear, Explicit };

struct AdvectionField {
  VectorField q;
  AdvectionKind kind = AdvectionKind::Zero;

  static AdvectionField zero(const Grid& grid);
  /// q = (-dH/dy, dH/dx) with H sampled at nodes and differenced by the
  /// centered stencil, so the discrete divergence cancels exactly. Torus only.
  static AdvectionField rotated_gradient(const Grid& grid, const std::function<double(const Vec2&)>& stream);
  /// q = (profile(y), 0) on a 2-D cell, divergence free and wall tangent.
  static AdvectionField shear(const Grid& grid, const std::function<double(double)>& profile);
  static AdvectionField explicit_field(const Grid& grid, const std::function<Vec2(const Vec2&)>& fn);
  static AdvectionField from_samples(VectorField samples);

  const Vec2& operator[](std::size_t i) const { return q[i]; }
};

enum class NonlinearityClass { Combustion, ZFK, KPP };
enum class NonlinearityForm { Homogeneous, Product, Explicit };

std::string to_string(NonlinearityClass c);
NonlinearityClass class_from_string(const std::string& s);

/// One-dimensional reaction profile g(u) with its known constants.
struct ReactionProfile {
  std::string name;
  std::function<double(double)> g;
  double dg0 = 0.0;     // g'(0)
  double slope1 = 0.0;  // one-sided g'(1-)
  double theta = 0.0;   // ignition temperature (combustion only)
  double rho = 0.0;     // g non-increasing on [1 - rho, 1]
  double lipschitz = 0.0;
  NonlinearityClass cls = NonlinearityClass::KPP;

  /// u(1 - u)
  static ReactionProfile fisher();
  /// max(0, u - theta)(1 - u)
  static ReactionProfile ignition(double theta);
  /// u^2 (1 - u)
  static ReactionProfile zfk_cubic();
};

class Nonlinearity {
 public:
  using Fn = std::function<double(std::size_t, double)>;

  double operator()(std::size_t node, double u) const {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return fn_(node, u);
  }

  NonlinearityClass cls() const { return cls_; }
  NonlinearityForm form() const { return form_; }
  double theta() const { return theta_; }
  double rho() const { return rho_; }
  const Field& zeta() const { return zeta_; }
  const Field& slope_at_one() const { return slope1_; }
  double lipschitz() const { return lipschitz_; }
  std::size_t size() const { return zeta_.size(); }
  std::string describe() const { return description_; }

  double min_zeta() const;
  double max_zeta() const;

  /// Node independent source (all nodes identical).
  bool homogeneous() const { return form_ == NonlinearityForm::Homogeneous; }

  static Nonlinearity make(Fn fn, NonlinearityClass cls, NonlinearityForm form, double theta, double rho,
                           Field zeta, Field slope1, double lipschitz, std::string description);

 private:
  Fn fn_;
  NonlinearityClass cls_ = NonlinearityClass::KPP;
  NonlinearityForm form_ = NonlinearityForm::Homogeneous;
  double theta_ = 0.0;
  double rho_ = 0.0;
  Field zeta_;
  Field slope1_;
  double lipschitz_ = 0.0;
  std::string description_;
};

Nonlinearity make_homogeneous_nonlinearity(const Grid& grid, const ReactionProfile& g);
Nonlinearity make_homogeneous_nonlinearity(const Grid& grid, const ReactionProfile& g, NonlinearityClass claimed);

/// f = h(x) g(u); rejects h <= 0 at any node.
Nonlinearity make_product_nonlinearity(const Grid& grid, const Field& h, const ReactionProfile& g);
Nonlinearity make_product_nonlinearity(const Grid& grid, const Field& h, const ReactionProfile& g,
                                       NonlinearityClass claimed);

/// Arbitrary node-wise source. zeta and the slope at one are estimated by
/// one-sided differencing with step 1e-6.
Nonlinearity make_explicit_nonlinearity(const Grid& grid, Nonlinearity::Fn fn, NonlinearityClass cls,
                                        double theta, double rho);

/// Smooth cut-off of the source below u = theta: f_theta = f chi(u / theta),
/// chi rising as 3r^2 - 2r^3 with r = u / theta - 1 on [1, 2].
Nonlinearity regularize_combustion(const Nonlinearity& f, double theta);
double cutoff(double u, double theta);

struct Clause {
  std::string name;
  bool passed = true;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Clause> clauses;
  NonlinearityClass cls = NonlinearityClass::KPP;

  bool passed() const;
  const Clause* find(const std::string& name) const;
  std::vector<std::string> failed() const;
  std::string to_text() const;
};

struct ValidationOptions {
  int s_points = 64;
  double symmetry_tol = 1e-12;
  double mean_tol = 1e-10;
};

ValidationReport validate_media(const Grid& grid, const DiffusionField& A, const AdvectionField& q,
                                const Nonlinearity& f, const ValidationOptions& opts = {});

}  // namespace pulsefront
