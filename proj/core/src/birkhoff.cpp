#include <algorithm>
#include <cmath>
#include <limits>

#include "posdyn/cooperative.hpp"
#include "posdyn/estimators.hpp"
#include "quadrature.hpp"

namespace posdyn {
namespace {

using detail::smooth_piece_integral;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double orbit_integral(const Observable& f, const Driver& driver, const DriverState& omega, double t0, double t1) {
  if (!(t1 >= t0)) throw PreconditionError("orbit_integral: need t0 <= t1");
  if (driver.discrete()) {
    if (std::floor(t0) != t0 || std::floor(t1) != t1) throw PreconditionError("orbit_integral: integer bounds required");
    double s = 0.0;
    DriverState at = driver.advance(omega, t0);
    for (double n = t0; n < t1; n += 1.0) {
      s += f(at);
      at = driver.advance(at, 1.0);
    }
    return s;
  }
  std::vector<double> bounds{t0};
  for (double b : driver.breakpoints(omega, t0, t1)) {
    if (b > bounds.back() && b < t1) bounds.push_back(b);
  }
  bounds.push_back(t1);
  double s = 0.0;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    if (!(bounds[p + 1] > bounds[p])) continue;
    const double margin = detail::piece_margin(bounds[p], bounds[p + 1]);
    const DriverState start = driver.advance(omega, bounds[p] + margin);
    s += detail::piece_integral([&](double u) { return f(driver.advance(start, u)); }, bounds[p + 1] - bounds[p], margin);
  }
  return s;
}

BirkhoffResult birkhoff_average(const Observable& f, const Driver& driver, const DriverState& omega, double T,
                                int batches) {
  if (batches < 2) throw PreconditionError("birkhoff_average: need at least 2 batches");
  if (!(T > 0.0)) throw PreconditionError("birkhoff_average: horizon must be > 0");
  if (driver.discrete() && (std::floor(T) != T || T < batches)) {
    throw PreconditionError("birkhoff_average: discrete horizon must be an integer >= batches");
  }
  BirkhoffResult r;
  double total = 0.0;
  double lo = 0.0;
  for (int b = 1; b <= batches; ++b) {
    double hi = T * b / batches;
    if (driver.discrete()) hi = std::floor(hi);
    const double s = orbit_integral(f, driver, omega, lo, hi);
    r.batch_means.push_back(s / (hi - lo));
    total += s;
    lo = hi;
  }
  r.time_average = total / T;
  r.estimate = batch_means_ci(r.batch_means);
  const auto [mn, mx] = std::minmax_element(r.batch_means.begin(), r.batch_means.end());
  if (*mx - *mn <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(*mx), std::abs(*mn))) {
    r.estimate.half_width = 0.0;
  }
  return r;
}

DivergenceLadder birkhoff_ladder(const Observable& f, const Driver& driver, std::span<const DriverState> omegas,
                                 std::span<const double> horizons, double threshold) {
  if (omegas.empty() || horizons.empty()) throw PreconditionError("birkhoff_ladder: empty ensemble or horizon list");
  std::vector<double> hs(horizons.begin(), horizons.end());
  if (!std::is_sorted(hs.begin(), hs.end()) || !(hs.front() > 0.0)) {
    throw PreconditionError("birkhoff_ladder: horizons must be positive and increasing");
  }
  std::vector<std::vector<double>> averages(hs.size());
  for (const auto& omega : omegas) {
    double acc = 0.0;
    double lo = 0.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      acc += orbit_integral(f, driver, omega, lo, hs[i]);
      lo = hs[i];
      averages[i].push_back(acc / hs[i]);
    }
  }
  std::vector<double> means, widths;
  for (const auto& a : averages) {
    means.push_back(median(a));
    widths.push_back(mean_ci(a).half_width);
  }
  return make_ladder(std::move(hs), std::move(means), std::move(widths), threshold);
}

KappaEstimate lambda1_via_kappa(const OdeModel& model, const DriverState& omega, double T, const KappaOptions& opts) {
  if (!(T > 0.0)) throw PreconditionError("lambda1_via_kappa: horizon must be > 0");
  if (!(opts.dt > 0.0)) throw PreconditionError("lambda1_via_kappa: dt must be > 0");
  if (opts.batches < 2) throw PreconditionError("lambda1_via_kappa: need at least 2 batches");
  const OdeCocycle c(model);
  FloquetOptions fo;
  fo.dt = opts.dt;
  Vector w = pullback_direction(c, omega, opts.warmup, fo);

  const auto steps = static_cast<std::int64_t>(std::ceil(T / opts.dt - 1e-9));
  const double h = T / static_cast<double>(steps);
  const auto batches = static_cast<std::int64_t>(std::min<std::int64_t>(opts.batches, steps));
  std::vector<double> sums(static_cast<std::size_t>(batches), 0.0), spans(static_cast<std::size_t>(batches), 0.0);
  double total = 0.0;
  const Driver& d = model.driver();
  for (std::int64_t k = 0; k < steps; ++k) {
    const DriverState base = d.advance(omega, static_cast<double>(k) * h);
    auto kappa_at = [&](double tau) {
      const Vector wt = tau > 0.0 ? integrate(model, base, w, tau).direction : w;
      return kappa_functional(model.field(d.advance(base, tau)), wt / wt.norm());
    };
    std::vector<double> bounds{0.0};
    for (double b : model.breakpoints(base, 0.0, h)) {
      if (b > bounds.back() && b < h) bounds.push_back(b);
    }
    bounds.push_back(h);
    double chunk = 0.0;
    for (std::size_t p = 0; p + 1 < bounds.size(); ++p) chunk += smooth_piece_integral(kappa_at, bounds[p], bounds[p + 1]);
    total += chunk;
    const auto b = static_cast<std::size_t>(k * batches / steps);
    sums[b] += chunk;
    spans[b] += h;
    Vector next = integrate(model, base, w, h).direction;
    for (Eigen::Index i = 0; i < next.size(); ++i) {
      if (model.cone().sign(static_cast<int>(i)) * next[i] < 0.0) next[i] = 0.0;
    }
    w = next / next.norm();
  }
  KappaEstimate est;
  est.lambda1 = total / T;
  std::vector<double> means(sums.size());
  for (std::size_t b = 0; b < sums.size(); ++b) means[b] = sums[b] / spans[b];
  est.ci = batch_means_ci(means);
  return est;
}

}  // namespace posdyn
