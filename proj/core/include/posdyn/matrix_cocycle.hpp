#pragma once

// Discrete-time positive matrix cocycles S^(n)(omega), their duals, the
// row/column statistics of a positive matrix and the sample-based checkers
// for the positivity, focusing and one-direction strong positivity
// conditions.

#include <cstdint>
#include <functional>
#include <vector>

#include "posdyn/matrix_model.hpp"
#include "posdyn/order.hpp"
#include "posdyn/statistics.hpp"

namespace posdyn {

/// S^(n)(omega) = S(theta^{n-1} omega) ... S(omega) as a unit operator-norm
/// matrix and a log scale. The product is rescaled after every factor, so
/// neither overflow nor underflow can occur; a product that vanishes exactly
/// has log_scale = -inf and a zero direction. n = 0 gives (I, 0).
ScaledMatrix cocycle_product(const MatrixModel& model, const DriverState& omega, std::int64_t n);

/// Unnormalized S^(n)(omega); only sensible for short lags.
Matrix lag_product(const MatrixModel& model, const DriverState& omega, std::int64_t n);

/// S*(omega) = S(theta^{-1} omega)^T.
Matrix dual_step(const MatrixModel& model, const DriverState& omega);

struct MatrixStats {
  Vector col_min;  // m_c,i = min_j s_ji
  Vector col_max;  // M_c,i
  Vector row_min;  // m_r,i = min_j s_ij
  Vector row_max;  // M_r,i
  double min_row_sum = 0.0;  // m_r
  double min_col_sum = 0.0;  // m_c
  double min_entry = 0.0;    // m
  double max_entry = 0.0;    // M
};

MatrixStats matrix_stats(const Matrix& s);

/// Explicit focusing constants for a strictly positive matrix:
/// beta(u) e <= S u <= kappa beta(u) e for every u >= 0, u != 0, with
/// e = (1, ..., 1)/sqrt(N), beta(u) = sqrt(N) sum_i u_i m_c,i and
/// kappa = N max_i M_c,i / m_c,i. The starred quantities are the row
/// analogues, i.e. the same construction for S^T.
struct FocusingCertificate {
  double kappa = 0.0;
  double kappa_star = 0.0;
  Vector e;
  Vector col_min;
  Vector row_min;

  double beta(const Vector& u) const;
  double beta_star(const Vector& u_star) const;
};

/// Throws PreconditionError when some entry of s is not strictly positive.
FocusingCertificate focusing_certificate(const Matrix& s);

/// Reciprocal 2-norm condition number; zero for singular matrices.
double reciprocal_condition(const Matrix& s);

inline constexpr double kNonsingularRcond = 1e-12;

struct MatrixCheckOptions {
  std::uint64_t seed = 1;
  int n_samples = 200;
  int lag = 1;  // time-T focusing: conditions are checked on S^(lag)
};

/// D1.i (nonnegativity), D1.ii (nonsingularity via reciprocal condition
/// number), D1.iii (ln+ M integrable; empirical).
std::vector<AssumptionReport> check_D1(const MatrixModel& model, const MatrixCheckOptions& opts);

/// D2.i-iii plus the sufficient max/min conditions on ln M - ln m.
std::vector<AssumptionReport> check_D2(const MatrixModel& model, const MatrixCheckOptions& opts);

/// D3.i-ii plus the sufficient condition ln- m integrable.
std::vector<AssumptionReport> check_D3(const MatrixModel& model, const MatrixCheckOptions& opts);

}  // namespace posdyn
