#include "posdyn/cocycle.hpp"

#include <cmath>

namespace posdyn {
namespace {

std::int64_t steps_of(double t) {
  if (!(t >= 0.0) || std::floor(t) != t) throw PreconditionError("matrix cocycle: time must be a nonnegative integer");
  return static_cast<std::int64_t>(t);
}

}  // namespace

MatrixCocycle::MatrixCocycle(MatrixModel model, bool dual, Cone cone)
    : model_(std::move(model)), dual_(dual), cone_(cone) {
  cone_.check_dim(model_.dim());
}

std::string MatrixCocycle::describe() const { return (dual_ ? "dual " : "") + model_.description(); }

double MatrixCocycle::apply(const DriverState& omega, double t, Matrix& x) const {
  if (x.rows() != model_.dim()) throw DimensionError("matrix cocycle: state has the wrong dimension");
  const std::int64_t n = steps_of(t);
  const Driver& d = model_.driver();
  double log_scale = 0.0;
  DriverState at = omega;
  for (std::int64_t k = 0; k < n; ++k) {
    if (dual_) {
      at = d.advance(at, -1.0);
      x = model_.emit(at).transpose() * x;
    } else {
      x = model_.emit(at) * x;
      at = d.advance(at, 1.0);
    }
    const double m = x.cwiseAbs().maxCoeff();
    if (m > 0.0 && std::isfinite(m)) {
      x /= m;
      log_scale += std::log(m);
    } else if (!std::isfinite(m)) {
      throw NumericalFailure("matrix cocycle: non-finite product");
    }
  }
  return log_scale;
}

DriverState MatrixCocycle::shift(const DriverState& omega, double t) const {
  return model_.driver().advance(omega, dual_ ? -t : t);
}

std::unique_ptr<Cocycle> MatrixCocycle::dual() const { return std::make_unique<MatrixCocycle>(model_, !dual_, cone_); }

OdeCocycle::OdeCocycle(OdeModel model, bool dual, IntegratorOptions opts)
    : model_(std::move(model)), dual_(dual), opts_(opts) {}

std::string OdeCocycle::describe() const { return (dual_ ? "dual " : "") + model_.description(); }

double OdeCocycle::apply(const DriverState& omega, double t, Matrix& x) const {
  return dual_ ? propagate_dual(model_, omega, t, x, opts_) : propagate(model_, omega, t, x, opts_);
}

DriverState OdeCocycle::shift(const DriverState& omega, double t) const {
  return model_.driver().advance(omega, dual_ ? -t : t);
}

std::unique_ptr<Cocycle> OdeCocycle::dual() const { return std::make_unique<OdeCocycle>(model_, !dual_, opts_); }

}  // namespace posdyn
