#include "posdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace posdyn {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr double kRenormHigh = 1e100;
constexpr double kRenormLow = 1e-100;

double renormalize(Matrix& x) {
  const double n = x.cwiseAbs().maxCoeff();
  if (n > kRenormHigh || (n < kRenormLow && n > 0.0)) {
    x /= n;
    return std::log(n);
  }
  return 0.0;
}

std::string neighborhood(double tau, double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << "step-size underflow at t = " << tau << " in smooth piece [" << a << ", " << b << "]";
  return os.str();
}

// One smooth piece [a, b]; h is the step-size guess, updated in place.
double integrate_piece(const TimeField& field, double a, double b, Matrix& x, double& h, const IntegratorOptions& opts) {
  const double len = b - a;
  if (!(len > 0.0)) return 0.0;
  const double eps = std::min(1e-12 * std::max(1.0, std::abs(b)), len / 4.0);
  auto eval = [&](double tau) { return field(std::clamp(tau, a + eps, b - eps)); };

  double log_scale = renormalize(x);
  double tau = a;
  Matrix k1 = eval(a) * x;
  if (h <= 0.0) {
    const double fn = std::max(eval(a).cwiseAbs().rowwise().sum().maxCoeff(), 1e-3);
    h = 0.1 / fn;
  }
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  while (tau < b) {
    const bool last = tau + h >= b - 1e-15 * std::max(1.0, std::abs(b));
    const double step = last ? b - tau : h;
    const double min_step = 1e-14 * std::max(1.0, std::abs(tau));
    if (step < min_step && !last) throw NumericalFailure(neighborhood(tau, a, b));

    const Matrix f2 = eval(tau + c2 * step);
    const Matrix k2 = f2 * (x + step * (a21 * k1));
    const Matrix k3 = eval(tau + c3 * step) * (x + step * (a31 * k1 + a32 * k2));
    const Matrix k4 = eval(tau + c4 * step) * (x + step * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 = eval(tau + c5 * step) * (x + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix f6 = eval(tau + step);
    const Matrix k6 = f6 * (x + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Matrix xn = x + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = f6 * xn;
    const Matrix err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!xn.allFinite()) throw NumericalFailure(neighborhood(tau, a, b) + " (non-finite state)");

    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double col = std::max(x.col(j).cwiseAbs().maxCoeff(), xn.col(j).cwiseAbs().maxCoeff());
      const double atol = opts.rtol * col;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double sc = atol + opts.rtol * std::max(std::abs(x(i, j)), std::abs(xn(i, j)));
        if (sc > 0.0) worst = std::max(worst, std::abs(err(i, j)) / sc);
      }
    }
    const double fac = worst == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(worst, -0.2), 0.2, 5.0);
    if (worst <= 1.0) {
      tau = last ? b : tau + step;
      x = std::move(xn);
      k1 = k7;
      const double ls = renormalize(x);
      if (ls != 0.0) {
        log_scale += ls;
        k1 /= std::exp(ls);
      }
      // A shortened final step says nothing about the next piece's scale.
      if (!last || step >= h) h = step * fac;
    } else {
      h = step * fac;
      if (h < min_step) throw NumericalFailure(neighborhood(tau, a, b));
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  return log_scale;
}

std::vector<double> piece_bounds(const std::vector<double>& breakpoints, double t) {
  std::vector<double> out{0.0};
  for (double b : breakpoints) {
    if (b > out.back() && b < t) out.push_back(b);
  }
  out.push_back(t);
  return out;
}

}  // namespace

double integrate_linear(const TimeField& field, const std::vector<double>& breakpoints, double t, Matrix& x,
                        const IntegratorOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("integrate: t must be finite and >= 0");
  if (!(opts.rtol > 0.0)) throw PreconditionError("integrate: rtol must be positive");
  if (t == 0.0) return 0.0;
  const auto bounds = piece_bounds(breakpoints, t);
  double h = 0.0;
  double log_scale = 0.0;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    log_scale += integrate_piece(field, bounds[p], bounds[p + 1], x, h, opts);
  }
  return log_scale;
}

double propagate(const OdeModel& model, const DriverState& omega, double t, Matrix& x, const IntegratorOptions& opts) {
  if (x.rows() != model.dim()) throw DimensionError("integrate: state has the wrong dimension");
  if (t == 0.0) return 0.0;
  const Driver& d = model.driver();
  const TimeField field = [&](double tau) { return model.field(d.advance(omega, tau)); };
  return integrate_linear(field, model.breakpoints(omega, 0.0, t), t, x, opts);
}

double propagate_dual(const OdeModel& model, const DriverState& omega, double t, Matrix& x,
                      const IntegratorOptions& opts) {
  if (x.rows() != model.dim()) throw DimensionError("integrate: state has the wrong dimension");
  if (t == 0.0) return 0.0;
  const Driver& d = model.driver();
  const TimeField field = [&](double tau) { return Matrix(model.field(d.advance(omega, -tau)).transpose()); };
  std::vector<double> bp = model.breakpoints(omega, -t, 0.0);
  for (double& b : bp) b = -b;
  std::sort(bp.begin(), bp.end());
  return integrate_linear(field, bp, t, x, opts);
}

ScaledVector integrate(const OdeModel& model, const DriverState& omega, const Vector& u0, double t,
                       const IntegratorOptions& opts) {
  if (u0.size() != model.dim()) throw DimensionError("integrate: u0 has the wrong dimension");
  const double n0 = u0.norm();
  if (!(n0 > 0.0)) throw PreconditionError("integrate: u0 must be nonzero");
  Matrix x = u0 / n0;
  const double ls = propagate(model, omega, t, x, opts);
  const double n = x.col(0).norm();
  if (!(n > 0.0)) return {Vector::Zero(model.dim()), -std::numeric_limits<double>::infinity()};
  return {x.col(0) / n, ls + std::log(n)};
}

ScaledMatrix propagator(const OdeModel& model, const DriverState& omega, double t, const IntegratorOptions& opts) {
  Matrix x = Matrix::Identity(model.dim(), model.dim());
  const double ls = propagate(model, omega, t, x, opts);
  const Eigen::JacobiSVD<Matrix> svd(x);
  const double n = svd.singularValues()(0);
  return {x / n, ls + std::log(n)};
}

}  // namespace posdyn
