#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "pulsefront/kpp_speed.hpp"
#include "pulsefront/media.hpp"
#include "pulsefront/testfunction.hpp"

namespace pulsefront {

/// M copies of the cell along x. The state 0 lies on the left (x -> -inf),
/// the state 1 on the right; fronts travel towards -x.
struct StripDomain {
  Grid cell;
  int periods = 0;
  Grid strip;
  bool clamped = true;  // Dirichlet u = 0 / u = 1 at the ends, otherwise reflecting

  static StripDomain make(const Grid& cell, int periods, bool clamped = true);
  std::size_t cell_node(std::size_t strip_node) const;
  double length() const { return strip.n(0) * strip.h(0); }
};

struct TimeSample {
  double t = 0.0;
  double x_mass = 0.0;
  double x_level = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
};

struct Snapshot {
  double t = 0.0;
  std::int64_t shift = 0;  // array node i sits at lattice index i + shift * n_cell
  Field u;
};

struct SimState {
  double t = 0.0;
  Field u;
  std::int64_t shift = 0;
  double clip = 0.0;      // largest clipping magnitude over all steps
  double last_clip = 0.0; // clipping magnitude of the latest step
  std::vector<TimeSample> history;
};

class FrontSimulator {
 public:
  /// Throws CFLError if dt exceeds 0.5 h / max|q| or 1 / Lip(f).
  FrontSimulator(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q, const Nonlinearity& f,
                 double dt);

  const StripDomain& domain() const { return domain_; }
  double dt() const { return dt_; }

  /// One Lie step: explicit reaction, explicit upwind advection, implicit diffusion.
  void step(SimState& state) const;

  /// Moves the window by whole periods to keep the front near 70% of the strip.
  bool recentre(SimState& state) const;

  double x_mass(const SimState& state) const;
  double x_level(const SimState& state) const;
  TimeSample sample(const SimState& state) const;
  Field cross_mean(const Field& u) const;

 private:
  StripDomain domain_;
  double dt_;
  const Nonlinearity* f_;
  std::vector<std::size_t> to_cell_;
  SparseMatrix advection_;
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>> diffusion_;
  std::shared_ptr<const Nonlinearity> f_owned_;
};

enum class InitialKind { Heaviside, PlanarSeed };

struct SimOptions {
  double dt = 0.01;
  double t_burn = 10.0;
  double t_fit = 20.0;
  double sample_every = 0.1;
  InitialKind initial = InitialKind::Heaviside;
  double x0_fraction = 0.7;  // initial interface position as a fraction of the strip
  double amplitude = 1.0;    // Heaviside height
  std::shared_ptr<const Profile> seed;  // PlanarSeed profile V(x - x0)
  bool recentre = true;
  double snapshot_every = 0.0;  // 0 disables snapshots
  double snapshot_from = 0.0;
};

struct SimRun {
  SpeedEstimate estimate;
  std::vector<TimeSample> series;
  std::vector<Snapshot> snapshots;
  SimState final_state;
  double max_clip = 0.0;
};

SimState initial_state(const StripDomain& domain, const SimOptions& opts);

/// Runs to t_burn + t_fit and fits X_mass over the fit window. The estimate's
/// value is minus the slope; uncertainty is the 95% slope interval plus h / t_fit.
SimRun run_front_simulation(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q,
                            const Nonlinearity& f, const SimOptions& opts);

SpeedEstimate measure_front_speed(const StripDomain& domain, const DiffusionField& A, const AdvectionField& q,
                                  const Nonlinearity& f, const SimOptions& opts);

/// Speeds of the cut-off sources f_theta for descending theta.
std::vector<SpeedEstimate> measure_c_theta_curve(const StripDomain& domain, const DiffusionField& A,
                                                 const AdvectionField& q, const Nonlinearity& f,
                                                 const std::vector<double>& thetas, const SimOptions& opts);

struct ExtractOptions {
  double phi_floor = 1e-3;  // keep s where floor <= phi <= 1 - floor at every node
  int s_points = 257;
  double bandwidth = 0.0;   // half-width of the local cubic fit in s; 0 picks 3 h
  bool logit_fit = true;    // fit log(u / (1 - u)) instead of u
};

/// phi(s, x) = u(t, x) at s = x + c t from a sequence of snapshots, as an
/// explicit test function on the cell grid.
TestFunction extract_front_testfunction(const StripDomain& domain, const std::vector<Snapshot>& snapshots, double c,
                                        const ExtractOptions& opts = {});

struct PulsatingCheck {
  double mismatch = 0.0;  // sup over the front cell of |u(t + L/c, x) - u(t, x + L)|
  double t = 0.0;
  std::int64_t cell = 0;  // lattice index of the first node of the compared cell
};

/// Compares u(t + L/c, x) (time-interpolated between snapshots) with
/// u(t, x + L) over the cell containing the level-1/2 front at time t.
PulsatingCheck pulsating_mismatch(const StripDomain& domain, const std::vector<Snapshot>& snapshots, double c,
                                  std::size_t reference = 0);

void write_time_series_csv(std::ostream& os, const std::vector<TimeSample>& series);
void write_snapshot_csv(std::ostream& os, const StripDomain& domain, const Snapshot& snap);
void write_snapshot_binary(std::ostream& os, const StripDomain& domain, const Snapshot& snap);
Snapshot read_snapshot_binary(std::istream& is, std::uint32_t& nx, std::uint32_t& ny);

}  // namespace pulsefront
