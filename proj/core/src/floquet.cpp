#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "posdyn/estimators.hpp"

namespace posdyn {
namespace {

struct StepGrid {
  std::int64_t steps = 0;
  double h = 1.0;
};

StepGrid grid_for(const Cocycle& c, double T, double dt) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw PreconditionError("horizon must be finite and >= 0");
  if (c.discrete()) {
    if (std::floor(T) != T) throw PreconditionError("horizon must be an integer for matrix cocycles");
    return {static_cast<std::int64_t>(T), 1.0};
  }
  if (!(dt > 0.0)) throw PreconditionError("dt must be > 0");
  const auto k = static_cast<std::int64_t>(std::ceil(T / dt - 1e-9));
  return {k, k > 0 ? T / static_cast<double>(k) : dt};
}

// Checks the cone within tol |u| and clips the tolerated round-off.
void enforce_cone(Vector& u, const Cone& cone, double tol, double t) {
  const double bound = tol * u.norm();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double v = cone.sign(static_cast<int>(i)) * u[i];
    if (v < -bound) {
      std::ostringstream os;
      os.precision(17);
      os << "iterate left the cone at t = " << t << ": coordinate " << i + 1 << " = " << u[i];
      throw PositivityViolation(os.str());
    }
    if (v < 0.0) u[i] = 0.0;
  }
}

void require_cone_vector(const Vector& u, const Cocycle& c, const char* what) {
  if (u.size() != c.dim()) throw DimensionError(std::string(what) + ": vector has the wrong dimension");
  if (!(u.norm() > 0.0)) throw PreconditionError(std::string(what) + ": vector must be nonzero");
  if (!cone_contains(u, c.cone())) throw PreconditionError(std::string(what) + ": vector must lie in the cone");
}

}  // namespace

FloquetTrack forward_floquet(const Cocycle& c, const DriverState& omega, const Vector& u0, double T,
                             const FloquetOptions& opts) {
  require_cone_vector(u0, c, "forward_floquet");
  const StepGrid g = grid_for(c, T, opts.dt);
  FloquetTrack track;
  track.w = u0 / u0.norm();
  track.horizon = T;
  DriverState at = omega;
  Matrix x(c.dim(), 1);
  for (std::int64_t k = 0; k < g.steps; ++k) {
    x.col(0) = track.w;
    const double ls = c.apply(at, g.h, x);
    const double n = x.col(0).norm();
    const double t = static_cast<double>(k + 1) * g.h;
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalFailure("forward_floquet: iterate vanished or overflowed");
    Vector u = x.col(0) / n;
    enforce_cone(u, c.cone(), opts.cone_tol, t);
    track.w = u / u.norm();
    const double ln_rho = ls + std::log(n);
    track.log_growth += ln_rho;
    if (opts.record_history) track.history.push_back({t, ln_rho, track.w});
    at = c.discrete() ? c.shift(at, 1.0) : c.shift(omega, t);
  }
  track.omega_end = at;
  return track;
}

Vector pullback_direction(const Cocycle& c, const DriverState& omega, double T0, const FloquetOptions& opts) {
  if (!(T0 >= 0.0)) throw PreconditionError("pullback: depth must be >= 0");
  FloquetOptions o = opts;
  o.record_history = false;
  const DriverState start = c.shift(omega, -T0);
  return forward_floquet(c, start, c.cone().interior_unit(c.dim()), T0, o).w;
}

Vector dual_floquet(const Cocycle& c, const DriverState& omega, double T, const FloquetOptions& opts) {
  const auto d = c.dual();
  return pullback_direction(*d, omega, T, opts);
}

std::vector<OrbitPoint> backward_entire_orbit(const Cocycle& c, const DriverState& omega, std::int64_t m,
                                              const Vector& probe) {
  if (m < 1) throw PreconditionError("backward_entire_orbit: depth must be >= 1");
  require_cone_vector(probe, c, "backward_entire_orbit");
  std::vector<OrbitPoint> out;
  out.reserve(static_cast<std::size_t>(m + 1));
  DriverState at = c.shift(omega, static_cast<double>(-m));
  Vector v = probe / probe.norm();
  out.push_back({-m, v, 0.0});
  Matrix x(c.dim(), 1);
  for (std::int64_t n = -m + 1; n <= 0; ++n) {
    x.col(0) = v;
    const double ls = c.apply(at, 1.0, x);
    const double nrm = x.col(0).norm();
    if (!(nrm > 0.0)) throw NumericalFailure("backward_entire_orbit: orbit vanished");
    v = x.col(0) / nrm;
    out.push_back({n, v, ls + std::log(nrm)});
    at = c.discrete() ? c.shift(at, 1.0) : c.shift(omega, static_cast<double>(n));
  }
  return out;
}

OrbitConvergence orbit_convergence(const Cocycle& c, const DriverState& omega, std::int64_t m, const Vector& probe) {
  OrbitConvergence r;
  r.v_m = backward_entire_orbit(c, omega, m, probe).back().v;
  r.v_2m = backward_entire_orbit(c, omega, 2 * m, probe).back().v;
  r.distance = (r.v_m - r.v_2m).norm();
  return r;
}

DivergenceLadder make_ladder(std::vector<double> horizons, std::vector<double> means, std::vector<double> half_widths,
                             double threshold) {
  DivergenceLadder l;
  l.horizons = std::move(horizons);
  l.means = std::move(means);
  l.half_widths = std::move(half_widths);
  l.threshold = threshold;
  l.strictly_decreasing = l.means.size() >= 2;
  for (std::size_t i = 1; i < l.means.size(); ++i) {
    if (!(l.means[i] < l.means[i - 1])) l.strictly_decreasing = false;
  }
  l.below_threshold = !l.means.empty() && l.means.back() < threshold;
  l.diverging = l.strictly_decreasing && l.below_threshold;
  return l;
}

Lambda1Estimate estimate_lambda1(const Cocycle& c, const DriverState& omega, const Lambda1Options& opts) {
  if (opts.batches < 2) throw PreconditionError("estimate_lambda1: need at least 2 batches");
  FloquetOptions fo;
  fo.dt = opts.dt;
  Lambda1Estimate est;
  est.w_start = pullback_direction(c, omega, opts.warmup, fo);
  fo.record_history = true;
  est.track = forward_floquet(c, omega, est.w_start, opts.horizon, fo);
  est.lambda1_hat = est.track.lambda1_hat();

  const auto& hist = est.track.history;
  const std::size_t k = hist.size();
  if (k == 0) throw PreconditionError("estimate_lambda1: horizon must be positive");
  const std::size_t batches = std::min<std::size_t>(static_cast<std::size_t>(opts.batches), k);
  std::vector<double> sums(batches, 0.0), spans(batches, 0.0);
  double prev_t = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t b = i * batches / k;
    sums[b] += hist[i].ln_rho;
    spans[b] += hist[i].t - prev_t;
    prev_t = hist[i].t;
  }
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = sums[b] / spans[b];
  est.ci = batch_means_ci(means);

  std::vector<double> hs, ms;
  for (double frac : {0.125, 0.25, 0.5, 1.0}) {
    const auto upto = static_cast<std::size_t>(std::llround(frac * static_cast<double>(k)));
    if (upto == 0) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < upto; ++i) s += hist[i].ln_rho;
    hs.push_back(hist[upto - 1].t);
    ms.push_back(s / hist[upto - 1].t);
  }
  est.ladder = make_ladder(hs, ms, std::vector<double>(ms.size(), 0.0), opts.divergence_threshold);
  if (!opts.record_history) est.track.history.clear();
  return est;
}

std::vector<double> oseledets_qr(const Cocycle& c, const DriverState& omega, double T, double dt) {
  const StepGrid g = grid_for(c, T, dt);
  if (g.steps == 0) throw PreconditionError("oseledets_qr: horizon must be positive");
  const int n = c.dim();
  Matrix q = Matrix::Identity(n, n);
  std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
  DriverState at = omega;
  for (std::int64_t k = 0; k < g.steps; ++k) {
    const double ls = c.apply(at, g.h, q);
    const Eigen::HouseholderQR<Matrix> qr(q);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    q = qr.householderQ() * Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      if (r(i, i) < 0.0) q.col(i) = -q.col(i);
      sums[static_cast<std::size_t>(i)] += std::log(std::abs(r(i, i))) + ls;
    }
    const double t = static_cast<double>(k + 1) * g.h;
    at = c.discrete() ? c.shift(at, 1.0) : c.shift(omega, t);
  }
  for (double& s : sums) s /= T;
  std::sort(sums.begin(), sums.end(), std::greater<>());
  return sums;
}

}  // namespace posdyn
