#pragma once

// The two-dimensional cooperative system over the irrational torus rotation
// with A(omega) = [[a, 1], [1, a]], a(x1, x2) = -1/(x1 + x2)^2. Its
// propagator is exp(int a) e^{tB} with B = [[0, 1], [1, 0]], which makes it a
// closed-form oracle: w = (1, 1)/sqrt(2), separation rate 2 at every omega,
// and a principal exponent equal to -infinity.

#include <cstdint>
#include <string>
#include <vector>

#include "posdyn/estimators.hpp"
#include "posdyn/ode_model.hpp"

namespace posdyn {

/// a(omega) = -1/(x1 + x2)^2 on (0, 1]^2.
double torus_a(const TorusState& s);

OdeModel torus_example_model(double rho = kDefaultRho);

/// int_0^t a(theta_tau omega) dtau for any real t, exact on each wrap-free
/// piece: with c = x1 + x2 at the start of a piece of length D,
/// the piece contributes -D / (c (c + (1 + rho) D)).
double torus_a_integral(const TorusState& omega, double t, double rho = kDefaultRho);

/// U_omega(t) = exp(int_0^t a) e^{tB}: direction e^{tB} / e^{|t|} and
/// log scale int_0^t a + |t|.
ScaledMatrix closed_form_propagator(const TorusState& omega, double t, double rho = kDefaultRho);

/// coth 1, the value of both focusing constants for this model.
double torus_focusing_constant();

struct TorusValidationOptions {
  double rho = kDefaultRho;
  std::uint64_t seed = 1;
  // (a) propagator agreement
  int propagator_samples = 20;
  std::vector<double> propagator_times{0.5, 1.0, 2.0, 5.0, 10.0};
  double propagator_tol = 1e-8;
  // (b), (c) warm-up and separation
  int omega_samples = 5;
  double warmup = 50.0;
  double horizon = 50.0;
  double dt = 0.1;
  double w_tol = 1e-6;
  double sigma_lo = 1.9;
  double sigma_hi = 2.1;
  // (d) divergence of the kappa averages
  std::vector<double> ladder_horizons{125.0, 250.0, 500.0, 1000.0};
  int ladder_samples = 100;
  double divergence_threshold = -10.0;
};

struct TorusValidationItem {
  std::string id;
  bool pass = false;
  double value = 0.0;  // worst observed value
  double tolerance = 0.0;
  std::string detail;
};

struct TorusValidationReport {
  std::vector<TorusValidationItem> items;
  double kappa_constant = 0.0;  // coth 1
  std::vector<double> sigma_hats;
  std::vector<double> lambda1_hats;
  std::vector<double> w_errors;
  double max_propagator_error = 0.0;
  DivergenceLadder ladder;
  bool all_pass() const;
};

/// Runs the generic integrator and estimators on the model and compares them
/// with the closed form: (a) propagator, (b) w, (c) sigma, (d) divergence of
/// the kappa averages.
TorusValidationReport validate_against_closed_form(const TorusValidationOptions& opts = {});

}  // namespace posdyn
