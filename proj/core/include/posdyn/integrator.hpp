#pragma once

// Adaptive Dormand-Prince 5(4) integration of linear systems X' = F(tau) X
// whose coefficient is only piecewise continuous. Steps never straddle a
// breakpoint, and F is sampled strictly inside the current piece, so one-sided
// limits are respected (Caratheodory solutions).

#include <functional>
#include <vector>

#include "posdyn/ode_model.hpp"

namespace posdyn {

struct IntegratorOptions {
  double rtol = 1e-10;
  double max_step = 0.0;  // 0 = unbounded
};

/// F(tau) for tau in [0, t].
using TimeField = std::function<Matrix(double)>;

/// Integrates X' = F(tau) X on [0, t] in place. `breakpoints` are the
/// discontinuity times of F in (0, t), sorted. X is rescaled whenever its max
/// norm leaves [1e-100, 1e100]; the log of the removed factor is returned.
/// Throws NumericalFailure on step-size underflow.
double integrate_linear(const TimeField& field, const std::vector<double>& breakpoints, double t, Matrix& x,
                        const IntegratorOptions& opts = {});

/// u(t; omega, u0) = |u0| exp(log_scale) direction for t >= 0; log_scale is
/// the growth relative to |u0|.
ScaledVector integrate(const OdeModel& model, const DriverState& omega, const Vector& u0, double t,
                       const IntegratorOptions& opts = {});

/// U_omega(t) as (unit operator-norm direction, log scale), t >= 0.
ScaledMatrix propagator(const OdeModel& model, const DriverState& omega, double t, const IntegratorOptions& opts = {});

/// Propagates the columns of x by U_omega(t) in place; returns the log of the
/// removed scale.
double propagate(const OdeModel& model, const DriverState& omega, double t, Matrix& x,
                 const IntegratorOptions& opts = {});

/// Same for the dual flow u' = A(theta_{-tau} omega)^T u, which realizes
/// U*_omega(t) = U_{theta_{-t} omega}(t)^T.
double propagate_dual(const OdeModel& model, const DriverState& omega, double t, Matrix& x,
                      const IntegratorOptions& opts = {});

}  // namespace posdyn
