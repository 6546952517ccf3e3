#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "posdyn/estimators.hpp"

namespace posdyn {
namespace {

constexpr double kMinPairing = 1e-8;

// Orthonormal basis of v^perp as the trailing columns of a Householder Q.
Matrix orthogonal_complement(const Vector& v) {
  const Eigen::Index n = v.size();
  const Eigen::HouseholderQR<Matrix> qr{Matrix(v)};
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

double pairing_or_fail(const Vector& w, const Vector& w_star, double t) {
  const double p = std::abs(w.dot(w_star));
  if (p < kMinPairing) {
    std::ostringstream os;
    os.precision(17);
    os << "separation: w and w* nearly orthogonal at t = " << t << " (|<w, w*>| = " << p << ")";
    throw NumericalFailure(os.str());
  }
  return p;
}

}  // namespace

SeparationEstimate separation_estimate(const Cocycle& c, const DriverState& omega, double T,
                                       const SeparationOptions& opts) {
  if (!(T > 0.0)) throw PreconditionError("separation: horizon must be > 0");
  const int n = c.dim();
  if (n < 2) throw PreconditionError("separation: needs N >= 2");

  std::int64_t steps = 0;
  double h = 1.0;
  if (c.discrete()) {
    if (std::floor(T) != T) throw PreconditionError("separation: horizon must be an integer for matrix cocycles");
    steps = static_cast<std::int64_t>(T);
  } else {
    if (!(opts.dt > 0.0)) throw PreconditionError("separation: dt must be > 0");
    steps = static_cast<std::int64_t>(std::ceil(T / opts.dt - 1e-9));
    h = T / static_cast<double>(steps);
  }
  auto base_at = [&](std::int64_t k) { return c.shift(omega, static_cast<double>(k) * h); };

  FloquetOptions fo;
  fo.dt = h;

  // w*(theta_{t_k} omega) for k = 0..steps: a dual run from theta_T omega.
  const auto dual = c.dual();
  std::vector<Vector> w_star(static_cast<std::size_t>(steps + 1));
  {
    const DriverState end = base_at(steps);
    Vector ws = pullback_direction(*dual, end, opts.warmup, fo);
    w_star[static_cast<std::size_t>(steps)] = ws;
    Matrix x(n, 1);
    for (std::int64_t k = steps; k > 0; --k) {
      x.col(0) = ws;
      dual->apply(base_at(k), h, x);
      ws = x.col(0) / x.col(0).norm();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c.cone().sign(static_cast<int>(i)) * ws[i] < 0.0) ws[i] = 0.0;
      }
      ws /= ws.norm();
      w_star[static_cast<std::size_t>(k - 1)] = ws;
    }
  }

  SeparationEstimate est;
  est.horizon = T;
  est.w = pullback_direction(c, omega, opts.warmup, fo);
  est.w_star = w_star.front();
  est.f1_basis = orthogonal_complement(est.w_star);

  Vector w = est.w;
  Matrix frame = est.f1_basis;
  Matrix r_acc = Matrix::Identity(n - 1, n - 1);
  double log_w = 0.0;
  double log_f = 0.0;  // log scale of the restricted product, excluding r_acc
  bool annihilated = false;

  est.projection_norm_history.push_back({0.0, -std::log(pairing_or_fail(w, est.w_star, 0.0))});
  Matrix x(n, n);
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k + 1) * h;
    x.col(0) = w;
    x.rightCols(n - 1) = annihilated ? Matrix::Zero(n, n - 1) : frame;
    const double ls = c.apply(base_at(k), h, x);
    const double wn = x.col(0).norm();
    if (!(wn > 0.0)) throw NumericalFailure("separation: principal iterate vanished");
    w = x.col(0) / wn;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (c.cone().sign(static_cast<int>(i)) * w[i] < 0.0) w[i] = 0.0;
    }
    w /= w.norm();
    const double ln_rho = ls + std::log(wn);
    log_w += ln_rho;

    const Vector& ws = w_star[static_cast<std::size_t>(k + 1)];
    const double pairing = pairing_or_fail(w, ws, t);
    est.projection_norm_history.push_back({t, -std::log(pairing)});

    if (!annihilated) {
      Matrix f = x.rightCols(n - 1);
      const double fmax = f.colwise().norm().maxCoeff();
      if (!(fmax > opts.annihilation_tol * wn)) {
        annihilated = true;
      } else {
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
          const double cn = f.col(j).norm();
          if (cn > 0.0) est.max_invariance_residual = std::max(est.max_invariance_residual, std::abs(f.col(j).dot(ws)) / cn);
        }
        // P~ = I - w w*^T / <w, w*>: removes the drift along E~1.
        f -= w * (ws.transpose() * f) / w.dot(ws);
        const Eigen::HouseholderQR<Matrix> qr(f);
        const Matrix r = qr.matrixQR().topRows(n - 1).triangularView<Eigen::Upper>();
        frame = (qr.householderQ() * Matrix::Identity(n, n - 1));
        r_acc = r * r_acc;
        const double m = r_acc.cwiseAbs().maxCoeff();
        if (!(m > 0.0)) {
          annihilated = true;
        } else {
          r_acc /= m;
          log_f += ls + std::log(m);
        }
      }
    }

    est.times.push_back(t);
    est.ln_rho.push_back(ln_rho);
    est.w_history.push_back(w);
    if (annihilated) {
      est.log_ratio.push_back(-std::numeric_limits<double>::infinity());
    } else {
      const double top = Eigen::JacobiSVD<Matrix>(r_acc).singularValues()(0);
      est.log_ratio.push_back(log_f + std::log(top) - log_w);
    }
  }

  est.lambda1_hat = log_w / T;
  if (annihilated) {
    est.sigma_infinite = true;
    est.lambda2_hat = -std::numeric_limits<double>::infinity();
    est.sigma_hat = std::numeric_limits<double>::infinity();
  } else {
    const double ratio = est.log_ratio.back();
    est.sigma_hat = -ratio / T;
    est.lambda2_hat = est.lambda1_hat - est.sigma_hat;
  }

  std::vector<double> ts, ys;
  for (const auto& p : est.projection_norm_history) {
    if (p.t >= 0.5 * T) {
      ts.push_back(p.t);
      ys.push_back(p.ln_norm);
    }
  }
  est.temperedness_slope = ts.size() >= 2 ? fitted_slope(ts, ys) : 0.0;
  return est;
}

}  // namespace posdyn
