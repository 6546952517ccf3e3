#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "posdyn/estimators.hpp"
#include "posdyn/integrator.hpp"
#include "posdyn/torus_example.hpp"
#include "zoo.hpp"

using namespace posdyn;

TEST_CASE("closed form at t = 0") {
  const ScaledMatrix p = closed_form_propagator(TorusState{0.4, 0.7}, 0.0);
  CHECK(p.direction == Matrix::Identity(2, 2));
  CHECK(p.log_scale == 0.0);
}

TEST_CASE("closed form on a wrap-free piece matches quadrature") {
  const double rho = kDefaultRho;
  const double t = 0.5;  // x1 = 0.3 + t and x2 = 0.3 + rho t stay below 1
  const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double tau) { return -1.0 / std::pow(0.6 + (1.0 + rho) * tau, 2); }, 0.0, t, 10, 1e-15);
  const ScaledMatrix p = closed_form_propagator(TorusState{0.3, 0.3}, t);
  CHECK(p.log_scale == doctest::Approx(integral + t).epsilon(1e-12));
  CHECK(torus_a_integral(TorusState{0.3, 0.3}, t) == doctest::Approx(integral).epsilon(1e-12));
}

TEST_CASE("closed form: separation ratio is exactly exp(-2t)") {
  const Vector d = Vector::Constant(2, 1.0 / std::numbers::sqrt2);
  const Vector f{{1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2}};
  for (double t : {0.5, 1.0, 3.0, 7.0}) {
    const ScaledMatrix p = closed_form_propagator(TorusState{0.21, 0.83}, t);
    const double ratio = (p.direction * f).norm() / (p.direction * d).norm();
    CHECK(ratio == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-12));
  }
}

TEST_CASE("closed form is a cocycle in t, including negative time") {
  const Driver d = Driver::torus();
  const TorusState w{0.62, 0.17};
  const double s = 2.3, t = 4.1;
  const double whole = torus_a_integral(w, s + t);
  const double split = torus_a_integral(w, s) + torus_a_integral(std::get<TorusState>(d.advance(w, s)), t);
  CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  CHECK(torus_a_integral(w, -1.5) ==
        doctest::Approx(-torus_a_integral(std::get<TorusState>(d.advance(w, -1.5)), 1.5)).epsilon(1e-14));
}

TEST_CASE("generic integrator agrees with the closed form") {
  const OdeModel m = torus_example_model();
  for (std::uint64_t k = 0; k < 10; ++k) {
    const DriverState w = sample_point(m.driver(), 3, k);
    for (double t : {0.5, 2.0, 10.0}) {
      const ScaledMatrix gen = propagator(m, w, t);
      const ScaledMatrix cf = closed_form_propagator(std::get<TorusState>(w), t);
      CHECK(std::abs(gen.log_scale - cf.log_scale) / std::max(1.0, std::abs(cf.log_scale)) <= 1e-8);
      CHECK((gen.direction - cf.direction).norm() <= 1e-8);
    }
  }
}

TEST_CASE("generic separation estimate recovers the exact rate") {
  const OdeCocycle c(torus_example_model());
  const SeparationEstimate e = separation_estimate(c, sample_point(c.driver(), 4, 0), 50.0);
  CHECK(e.sigma_hat == doctest::Approx(2.0).epsilon(0.01));
  CHECK((e.w - Vector::Constant(2, 1.0 / std::numbers::sqrt2)).norm() < 1e-6);
}

TEST_CASE("focusing constant") { CHECK(torus_focusing_constant() == doctest::Approx(1.0 / std::tanh(1.0))); }

TEST_CASE("validation report") {
  const TorusValidationReport r = validate_against_closed_form();
  REQUIRE(r.items.size() == 4);
  CHECK(r.items[0].id == "a.propagator");
  CHECK(r.items[0].pass);
  CHECK(r.items[1].pass);
  CHECK(r.items[2].pass);
  CHECK(r.kappa_constant == doctest::Approx(torus_focusing_constant()));
  CHECK(r.sigma_hats.size() == 5);
  // The kappa averages trend down with the horizon; whether they also clear
  // the threshold is reported, not asserted here.
  CHECK(r.ladder.strictly_decreasing);
}
