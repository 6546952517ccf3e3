#include "posdyn/torus_example.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "posdyn/cooperative.hpp"
#include "posdyn/integrator.hpp"

namespace posdyn {

double torus_a(const TorusState& s) {
  const double c = s.x1 + s.x2;
  return -1.0 / (c * c);
}

OdeModel torus_example_model(double rho) {
  return OdeModel(
      2, Driver::torus(rho),
      [](const DriverState& omega) {
        const double a = torus_a(std::get<TorusState>(omega));
        Matrix m(2, 2);
        m << a, 1.0, 1.0, a;
        return m;
      },
      Cone::standard(), false, "torus-example");
}

double torus_a_integral(const TorusState& omega, double t, double rho) {
  if (!std::isfinite(t)) throw PreconditionError("torus_a_integral: non-finite t");
  const Driver d = Driver::torus(rho);
  if (t < 0.0) {
    const auto back = std::get<TorusState>(d.advance(omega, t));
    return -torus_a_integral(back, -t, rho);
  }
  if (t == 0.0) return 0.0;
  std::vector<double> bounds{0.0};
  for (double b : d.breakpoints(omega, 0.0, t)) {
    if (b > bounds.back() && b < t) bounds.push_back(b);
  }
  bounds.push_back(t);
  const double speed = 1.0 + rho;
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const double len = bounds[p + 1] - bounds[p];
    if (!(len > 0.0)) continue;
    // Right limit of x1 + x2 at the start of the piece, read off the midpoint.
    const double half = 0.5 * len;
    const auto mid = std::get<TorusState>(d.advance(omega, bounds[p] + half));
    const double c = (mid.x1 - half) + (mid.x2 - rho * half);
    total += -len / (c * (c + speed * len));
  }
  return total;
}

ScaledMatrix closed_form_propagator(const TorusState& omega, double t, double rho) {
  const double at = std::abs(t);
  const double e = std::exp(-2.0 * at);
  const double ch = 0.5 * (1.0 + e);
  const double sh = std::copysign(0.5 * (1.0 - e), t);
  ScaledMatrix out;
  out.direction.resize(2, 2);
  out.direction << ch, sh, sh, ch;
  out.log_scale = torus_a_integral(omega, t, rho) + at;
  return out;
}

double torus_focusing_constant() { return std::cosh(1.0) / std::sinh(1.0); }

bool TorusValidationReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

TorusValidationReport validate_against_closed_form(const TorusValidationOptions& opts) {
  const OdeModel model = torus_example_model(opts.rho);
  const Driver& d = model.driver();
  const OdeCocycle cocycle(model);
  const Vector w_exact = Vector::Constant(2, 1.0 / std::numbers::sqrt2);
  TorusValidationReport rep;
  rep.kappa_constant = torus_focusing_constant();

  {
    TorusValidationItem item{"a.propagator", true, 0.0, opts.propagator_tol, ""};
    double dir_err = 0.0;
    for (int k = 0; k < opts.propagator_samples; ++k) {
      const DriverState omega = sample_point(d, opts.seed, static_cast<std::uint64_t>(k));
      for (double t : opts.propagator_times) {
        const ScaledMatrix gen = propagator(model, omega, t);
        const ScaledMatrix cf = closed_form_propagator(std::get<TorusState>(omega), t, opts.rho);
        const double err = std::abs(gen.log_scale - cf.log_scale) / std::max(1.0, std::abs(cf.log_scale));
        item.value = std::max(item.value, err);
        dir_err = std::max(dir_err, (gen.direction - cf.direction).cwiseAbs().maxCoeff());
      }
    }
    item.pass = item.value <= opts.propagator_tol;
    std::ostringstream os;
    os.precision(3);
    os << "max relative log-scale error over " << opts.propagator_samples << " omega; max direction error " << dir_err;
    item.detail = os.str();
    rep.max_propagator_error = item.value;
    rep.items.push_back(item);
  }

  TorusValidationItem w_item{"b.direction", true, 0.0, opts.w_tol, "max |w - (1,1)/sqrt(2)| after pullback warm-up"};
  TorusValidationItem s_item{"c.separation", true, 0.0, 0.0, ""};
  FloquetOptions fo;
  fo.dt = opts.dt;
  SeparationOptions so;
  so.warmup = opts.warmup;
  so.dt = opts.dt;
  double worst_sigma = 2.0;
  for (int k = 0; k < opts.omega_samples; ++k) {
    const DriverState omega = sample_point(d, opts.seed + 1, static_cast<std::uint64_t>(k));
    const Vector w = pullback_direction(cocycle, omega, opts.warmup, fo);
    const double err = (w - w_exact).norm();
    rep.w_errors.push_back(err);
    w_item.value = std::max(w_item.value, err);
    const SeparationEstimate sep = separation_estimate(cocycle, omega, opts.horizon, so);
    rep.sigma_hats.push_back(sep.sigma_hat);
    rep.lambda1_hats.push_back(sep.lambda1_hat);
    if (std::abs(sep.sigma_hat - 2.0) >= std::abs(worst_sigma - 2.0)) worst_sigma = sep.sigma_hat;
    if (!(sep.sigma_hat >= opts.sigma_lo && sep.sigma_hat <= opts.sigma_hi)) s_item.pass = false;
  }
  w_item.pass = w_item.value <= opts.w_tol;
  s_item.value = worst_sigma;
  s_item.tolerance = opts.sigma_hi - 2.0;
  {
    std::ostringstream os;
    os << "sigma_hat in [" << opts.sigma_lo << ", " << opts.sigma_hi << "] at T = " << opts.horizon << " for "
       << opts.omega_samples << " omega; value is the worst sample";
    s_item.detail = os.str();
  }
  rep.items.push_back(w_item);
  rep.items.push_back(s_item);

  {
    std::vector<DriverState> omegas;
    for (int k = 0; k < opts.ladder_samples; ++k) {
      omegas.push_back(sample_point(d, opts.seed + 2, static_cast<std::uint64_t>(k)));
    }
    const Observable kappa = [&](const DriverState& omega) { return kappa_functional(model.field(omega), w_exact); };
    rep.ladder = birkhoff_ladder(kappa, d, omegas, opts.ladder_horizons, opts.divergence_threshold);
    TorusValidationItem item{"d.divergence", rep.ladder.diverging, rep.ladder.means.back(), opts.divergence_threshold, ""};
    std::ostringstream os;
    os.precision(6);
    os << "median kappa time average over " << opts.ladder_samples << " omega at T =";
    for (std::size_t i = 0; i < rep.ladder.horizons.size(); ++i) os << " " << rep.ladder.horizons[i] << ":" << rep.ladder.means[i];
    os << (rep.ladder.strictly_decreasing ? "; strictly decreasing" : "; not strictly decreasing");
    os << (rep.ladder.below_threshold ? "; below threshold" : "; above threshold");
    item.detail = os.str();
    rep.items.push_back(item);
  }
  return rep;
}

}  // namespace posdyn
