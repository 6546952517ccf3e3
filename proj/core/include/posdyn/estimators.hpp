#pragma once

// Finite-horizon estimators for positive cocycles: forward Floquet
// iteration, pullback to an entire orbit, the dual direction, the
// principal exponent with a divergence diagnostic, exponential separation,
// a QR Lyapunov spectrum and Birkhoff averages.

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "posdyn/cocycle.hpp"
#include "posdyn/statistics.hpp"

namespace posdyn {

struct FloquetRecord {
  double t = 0.0;
  double ln_rho = 0.0;  // log growth over the step ending at t
  Vector w;
};

struct FloquetTrack {
  Vector w;                 // unit direction at the end of the run
  double log_growth = 0.0;  // sum of ln rho
  double horizon = 0.0;
  DriverState omega_end;
  std::vector<FloquetRecord> history;

  double lambda1_hat() const { return horizon > 0.0 ? log_growth / horizon : 0.0; }
};

struct FloquetOptions {
  double dt = 0.1;              // ignored for discrete cocycles (step 1)
  bool record_history = false;
  double cone_tol = 1e-12;      // relative to |u|
};

/// Iterates u <- U(step) u / |U(step) u| from omega for time T, starting at
/// u0 in the cone. Throws PositivityViolation (with time and coordinate) when
/// the iterate leaves the cone by more than cone_tol |u|.
FloquetTrack forward_floquet(const Cocycle& c, const DriverState& omega, const Vector& u0, double T,
                             const FloquetOptions& opts = {});

/// w(omega) by pullback: forward_floquet from shift(omega, -T0) to omega,
/// started at the interior unit vector of the cone.
Vector pullback_direction(const Cocycle& c, const DriverState& omega, double T0 = 50.0,
                          const FloquetOptions& opts = {});

/// w*(omega): the principal direction of the dual cocycle, reached from
/// theta_T omega.
Vector dual_floquet(const Cocycle& c, const DriverState& omega, double T, const FloquetOptions& opts = {});

struct OrbitPoint {
  std::int64_t n = 0;
  Vector v;                // unit direction of the orbit at theta_n omega
  double log_scale = 0.0;  // ln |S(theta_{n-1} omega) v(n-1)|; 0 at n = -m
};

/// Positive entire orbit approximated by pushing `probe` from theta_{-m}
/// omega forward in unit steps; points for n = -m, ..., 0.
std::vector<OrbitPoint> backward_entire_orbit(const Cocycle& c, const DriverState& omega, std::int64_t m,
                                              const Vector& probe);

struct OrbitConvergence {
  Vector v_m;
  Vector v_2m;
  double distance = 0.0;
};

/// Direction at n = 0 from depths m and 2m.
OrbitConvergence orbit_convergence(const Cocycle& c, const DriverState& omega, std::int64_t m, const Vector& probe);

struct Lambda1Options {
  double horizon = 1000.0;
  double warmup = 50.0;
  double dt = 0.1;
  int batches = 20;
  double divergence_threshold = -10.0;
  bool record_history = false;
};

/// Means at nested horizons and the divergence verdict: strictly
/// decreasing, last below the threshold.
struct DivergenceLadder {
  std::vector<double> horizons;
  std::vector<double> means;
  std::vector<double> half_widths;
  double threshold = -10.0;
  bool strictly_decreasing = false;
  bool below_threshold = false;
  bool diverging = false;
};

DivergenceLadder make_ladder(std::vector<double> horizons, std::vector<double> means,
                             std::vector<double> half_widths, double threshold);

struct Lambda1Estimate {
  double lambda1_hat = 0.0;
  Estimate ci;               // batch means of the per-unit-time growth
  DivergenceLadder ladder;   // running lambda1_hat at T/8, T/4, T/2, T
  Vector w_start;            // w(omega) after warm-up
  FloquetTrack track;
};

/// Warm-up by pullback, then forward Floquet over [0, T] from omega.
Lambda1Estimate estimate_lambda1(const Cocycle& c, const DriverState& omega, const Lambda1Options& opts = {});

struct SeparationOptions {
  double warmup = 50.0;
  double dt = 0.1;  // frame re-orthonormalization cadence for flows
  double annihilation_tol = 1e-13;
};

struct ProjectionSample {
  double t = 0.0;
  double ln_norm = 0.0;  // ln |P~(theta_t omega)|
};

struct SeparationEstimate {
  double lambda1_hat = 0.0;
  double lambda2_hat = 0.0;  // -inf when the restricted norm vanished
  double sigma_hat = 0.0;    // +inf when the restricted norm vanished
  bool sigma_infinite = false;
  double horizon = 0.0;
  Vector w;                  // w(omega)
  Vector w_star;             // w*(omega)
  Matrix f1_basis;           // N x (N-1), orthonormal, spans w*(omega)^perp
  std::vector<ProjectionSample> projection_norm_history;
  double temperedness_slope = 0.0;  // fitted over [T/2, T]
  double max_invariance_residual = 0.0;
  std::vector<double> times;           // step end times
  std::vector<double> log_ratio;       // ln(|U|F~1| / |U w|) at those times
  std::vector<double> ln_rho;          // step growth of w
  std::vector<Vector> w_history;       // w(theta_t omega)
};

/// Exponential separation at omega over [0, T]; sigma_hat is the slope of
/// ln(|U_omega(t)|F~1(omega)| / |U_omega(t) w(omega)|). Throws
/// NumericalFailure when |<w, w*>| < 1e-8 along the orbit.
SeparationEstimate separation_estimate(const Cocycle& c, const DriverState& omega, double T,
                                       const SeparationOptions& opts = {});

/// QR Lyapunov spectrum over [0, T], sorted descending. Frames are
/// re-orthonormalized every step (matrix) or every dt (flow).
std::vector<double> oseledets_qr(const Cocycle& c, const DriverState& omega, double T, double dt = 0.1);

using Observable = std::function<double(const DriverState&)>;

struct BirkhoffResult {
  Estimate estimate;               // batch-means mean and CI
  std::vector<double> batch_means;
  double time_average = 0.0;       // plain average over [0, T]
};

/// Time average of f along theta_t omega over [0, T] split into `batches`
/// equal batches. Sums for discrete drivers; adaptive Gauss-Kronrod on each
/// smooth piece for continuous ones.
BirkhoffResult birkhoff_average(const Observable& f, const Driver& driver, const DriverState& omega, double T,
                                int batches);

/// Integral of f over [t0, t1] along the orbit (continuous drivers).
double orbit_integral(const Observable& f, const Driver& driver, const DriverState& omega, double t0, double t1);

/// Time averages of f at nested horizons over an ensemble of starting
/// points, aggregated by the median across the ensemble. The half-widths are
/// Student-t half-widths of the ensemble mean.
DivergenceLadder birkhoff_ladder(const Observable& f, const Driver& driver, std::span<const DriverState> omegas,
                                 std::span<const double> horizons, double threshold);

struct KappaOptions {
  double warmup = 50.0;
  double dt = 0.1;
  int batches = 20;
};

struct KappaEstimate {
  double lambda1 = 0.0;  // (1/T) int_0^T kappa(theta_t omega) dt
  Estimate ci;
};

/// lambda1 through the average of kappa(theta_t omega) = <A w, w> along the
/// orbit of w.
KappaEstimate lambda1_via_kappa(const OdeModel& model, const DriverState& omega, double T,
                                const KappaOptions& opts = {});

}  // namespace posdyn
