#pragma once

#include <cstdint>
#include <vector>

#include "posdyn/matrix_model.hpp"

namespace posdyn {

/// Law of one Leslie parameter, sampled by inversion of a uniform variate.
struct ParamDistribution {
  enum class Kind { Constant, Uniform, LogNormal };
  Kind kind = Kind::Constant;
  double a = 1.0;  // value | low | mu
  double b = 1.0;  // unused | high | sigma

  static ParamDistribution constant(double v) { return {Kind::Constant, v, v}; }
  static ParamDistribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static ParamDistribution lognormal(double mu, double sigma) { return {Kind::LogNormal, mu, sigma}; }

  double draw(double u) const;
  /// True when every draw is strictly positive.
  bool strictly_positive() const;
};

/// Random Leslie matrices: fertilities m_1..m_N in the first row, survival
/// rates b_1..b_{N-1} on the subdiagonal, zeros elsewhere, drawn
/// independently per step. Throws PreconditionError unless every law is
/// supported on (0, inf).
MatrixModel leslie_model(const std::vector<ParamDistribution>& fertility,
                         const std::vector<ParamDistribution>& survival);

/// Deterministic Leslie matrix from parameter values.
Matrix leslie_matrix(const Vector& fertility, const Vector& survival);

struct NStepPositivity {
  bool all_positive = true;
  int n_samples = 0;
  int failures = 0;
  int first_failing_sample = -1;
  double min_entry = 0.0;  // smallest entry of S^(N) over all samples
};

/// Checks that S^(N)(omega) is entrywise strictly positive on sampled omega.
NStepPositivity leslie_nstep_positive(const MatrixModel& model, std::uint64_t seed, int n_samples);

}  // namespace posdyn
