#include "posdyn/matrix_cocycle.hpp"

#include <cmath>
#include <limits>

namespace posdyn {

ScaledMatrix cocycle_product(const MatrixModel& model, const DriverState& omega, std::int64_t n) {
  if (n < 0) throw PreconditionError("cocycle_product: n must be nonnegative");
  const int dim = model.dim();
  ScaledMatrix out{Matrix::Identity(dim, dim), 0.0};
  const Driver& driver = model.driver();
  DriverState state = omega;
  for (std::int64_t k = 0; k < n; ++k) {
    out.direction = model.emit(state) * out.direction;
    const double f = out.direction.norm();
    if (f == 0.0) {
      out.direction.setZero();
      out.log_scale = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.direction /= f;
    out.log_scale += std::log(f);
    state = driver.advance(state, 1.0);
  }
  // Frobenius rescaling above; switch to the operator 2-norm at the end.
  if (n > 0) {
    const double op = out.direction.jacobiSvd().singularValues()(0);
    out.direction /= op;
    out.log_scale += std::log(op);
  }
  return out;
}

Matrix lag_product(const MatrixModel& model, const DriverState& omega, std::int64_t n) {
  if (n < 0) throw PreconditionError("lag_product: n must be nonnegative");
  Matrix p = Matrix::Identity(model.dim(), model.dim());
  DriverState state = omega;
  for (std::int64_t k = 0; k < n; ++k) {
    p = model.emit(state) * p;
    state = model.driver().advance(state, 1.0);
  }
  return p;
}

Matrix dual_step(const MatrixModel& model, const DriverState& omega) {
  return model.emit(model.driver().advance(omega, -1.0)).transpose();
}

MatrixStats matrix_stats(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) throw DimensionError("matrix_stats: square nonempty matrix required");
  MatrixStats st;
  st.col_min = s.colwise().minCoeff().transpose();
  st.col_max = s.colwise().maxCoeff().transpose();
  st.row_min = s.rowwise().minCoeff();
  st.row_max = s.rowwise().maxCoeff();
  st.min_row_sum = s.rowwise().sum().minCoeff();
  st.min_col_sum = s.colwise().sum().minCoeff();
  st.min_entry = s.minCoeff();
  st.max_entry = s.maxCoeff();
  return st;
}

double FocusingCertificate::beta(const Vector& u) const {
  if (u.size() != col_min.size()) throw DimensionError("beta: size mismatch");
  return std::sqrt(static_cast<double>(u.size())) * u.dot(col_min);
}

double FocusingCertificate::beta_star(const Vector& u_star) const {
  if (u_star.size() != row_min.size()) throw DimensionError("beta_star: size mismatch");
  return std::sqrt(static_cast<double>(u_star.size())) * u_star.dot(row_min);
}

FocusingCertificate focusing_certificate(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("focusing_certificate: square matrix required");
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (!(s(i, j) > 0.0)) {
        throw PreconditionError("focusing_certificate: entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") is not strictly positive");
      }
    }
  }
  const MatrixStats st = matrix_stats(s);
  const double n = static_cast<double>(s.rows());
  FocusingCertificate c;
  c.kappa = n * st.col_max.cwiseQuotient(st.col_min).maxCoeff();
  c.kappa_star = n * st.row_max.cwiseQuotient(st.row_min).maxCoeff();
  c.e = Vector::Constant(s.rows(), 1.0 / std::sqrt(n));
  c.col_min = st.col_min;
  c.row_min = st.row_min;
  return c;
}

double reciprocal_condition(const Matrix& s) {
  const Vector sv = s.jacobiSvd().singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

}  // namespace posdyn
