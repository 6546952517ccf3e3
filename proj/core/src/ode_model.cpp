#include "posdyn/ode_model.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "posdyn/matrix_model.hpp"

namespace posdyn {
namespace {

void require_square(const Matrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw DimensionError(std::string(what) + ": matrix has the wrong shape");
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": non-finite entry");
}

}  // namespace

OdeModel::OdeModel(int dim, Driver driver, Field field, Cone cone, bool constant, std::string description)
    : dim_(dim),
      driver_(std::move(driver)),
      field_(std::move(field)),
      cone_(cone),
      constant_(constant),
      description_(std::move(description)) {
  if (dim_ < 1) throw PreconditionError("ode model: dimension must be positive");
  if (driver_.discrete()) throw PreconditionError("ode model: needs a continuous-time driver");
  cone_.check_dim(dim_);
}

OdeModel OdeModel::constant(const Matrix& a) {
  require_square(a, a.rows(), "constant ode");
  return OdeModel(static_cast<int>(a.rows()), Driver::torus(), [a](const DriverState&) { return a; }, Cone::standard(), true,
                  "constant");
}

OdeModel OdeModel::iid_piecewise(std::vector<Matrix> matrices, std::vector<double> weights) {
  if (matrices.empty()) throw PreconditionError("iid piecewise: no matrices");
  const Eigen::Index n = matrices.front().rows();
  for (const auto& m : matrices) require_square(m, n, "iid piecewise");
  if (weights.size() != matrices.size()) throw DimensionError("iid piecewise: weights and matrices differ in length");
  std::vector<double> cum(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw PreconditionError("iid piecewise: negative weight");
    acc += weights[i];
    cum[i] = acc;
  }
  if (!(acc > 0.0)) throw PreconditionError("iid piecewise: weights sum to zero");
  for (double& c : cum) c /= acc;
  auto shared = std::make_shared<const std::vector<Matrix>>(std::move(matrices));
  const bool single = shared->size() == 1;
  return OdeModel(
      static_cast<int>(n), Driver::iid(TimeKind::Continuous),
      [shared, cum = std::move(cum)](const DriverState& omega) {
        return (*shared)[categorical(cum, Driver::uniform(std::get<ShiftState>(omega), 0))];
      },
      Cone::standard(), single, "iid-piecewise");
}

OdeModel OdeModel::markov_piecewise(const Matrix& transition, std::vector<Matrix> matrices) {
  if (static_cast<Eigen::Index>(matrices.size()) != transition.rows()) {
    throw DimensionError("markov piecewise: one matrix per chain state required");
  }
  const Eigen::Index n = matrices.front().rows();
  for (const auto& m : matrices) require_square(m, n, "markov piecewise");
  auto shared = std::make_shared<const std::vector<Matrix>>(std::move(matrices));
  return OdeModel(
      static_cast<int>(n), Driver::markov(transition, TimeKind::Continuous),
      [shared](const DriverState& omega) {
        return (*shared)[static_cast<std::size_t>(std::get<ShiftState>(omega).chain_state)];
      },
      Cone::standard(), shared->size() == 1, "markov-piecewise");
}

OdeModel OdeModel::torus_trig(const Matrix& base, const Matrix& amp1, const Matrix& amp2, double rho) {
  const Eigen::Index n = base.rows();
  require_square(base, n, "torus trig (base)");
  require_square(amp1, n, "torus trig (amp1)");
  require_square(amp2, n, "torus trig (amp2)");
  return OdeModel(
      static_cast<int>(n), Driver::torus(rho),
      [base, amp1, amp2](const DriverState& omega) {
        const auto& s = std::get<TorusState>(omega);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        return Matrix(base + std::sin(two_pi * s.x1) * amp1 + std::cos(two_pi * s.x2) * amp2);
      },
      Cone::standard(), false, "torus-trig");
}

Matrix OdeModel::field(const DriverState& omega) const {
  Matrix a = field_(omega);
  if (a.rows() != dim_ || a.cols() != dim_) throw DimensionError("ode model produced a matrix of the wrong size");
  return a;
}

std::vector<double> OdeModel::breakpoints(const DriverState& omega, double t0, double t1) const {
  if (constant_) return {};
  return driver_.breakpoints(omega, t0, t1);
}

OdeModel OdeModel::with_cone(Cone cone, std::string description) const {
  OdeModel m = *this;
  cone.check_dim(dim_);
  m.cone_ = cone;
  m.description_ = std::move(description);
  return m;
}

}  // namespace posdyn
