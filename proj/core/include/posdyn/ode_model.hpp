#pragma once

#include <functional>
#include <string>
#include <vector>

#include "posdyn/drivers.hpp"
#include "posdyn/order.hpp"
#include "posdyn/types.hpp"

namespace posdyn {

/// Coefficient field of u' = A(theta_t omega) u over a continuous-time
/// driver. t -> A(theta_t omega) is continuous between the driver's
/// breakpoints and has finite one-sided limits there.
class OdeModel {
 public:
  using Field = std::function<Matrix(const DriverState&)>;

  OdeModel(int dim, Driver driver, Field field, Cone cone = Cone::standard(), bool constant = false,
           std::string description = "ode");

  static OdeModel constant(const Matrix& a);
  /// A constant on each unit interval [n, n+1), drawn i.i.d. from the list.
  static OdeModel iid_piecewise(std::vector<Matrix> matrices, std::vector<double> weights);
  /// A constant on each unit interval, selected by a stationary Markov chain.
  static OdeModel markov_piecewise(const Matrix& transition, std::vector<Matrix> matrices);
  /// A(x1, x2) = base + sin(2 pi x1) amp1 + cos(2 pi x2) amp2 on the rotating
  /// torus; bounded and continuous in time.
  static OdeModel torus_trig(const Matrix& base, const Matrix& amp1, const Matrix& amp2, double rho = kDefaultRho);

  int dim() const { return dim_; }
  const Driver& driver() const { return driver_; }
  const Cone& cone() const { return cone_; }
  bool is_constant() const { return constant_; }
  const std::string& description() const { return description_; }

  /// A(omega).
  Matrix field(const DriverState& omega) const;

  /// Discontinuity times of tau -> A(theta_tau omega) in (t0, t1).
  std::vector<double> breakpoints(const DriverState& omega, double t0, double t1) const;

  /// Same model with a different cone and description (type-K systems).
  OdeModel with_cone(Cone cone, std::string description) const;

 private:
  int dim_;
  Driver driver_;
  Field field_;
  Cone cone_;
  bool constant_;
  std::string description_;
};

}  // namespace posdyn
