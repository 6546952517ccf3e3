#include "posdyn/leslie.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "posdyn/matrix_cocycle.hpp"

namespace posdyn {

double ParamDistribution::draw(double u) const {
  switch (kind) {
    case Kind::Uniform:
      return a + (b - a) * u;
    case Kind::LogNormal: {
      // u in [0, 1); keep the quantile finite.
      const double p = std::clamp(u, 1e-16, 1.0 - 1e-16);
      return std::exp(boost::math::quantile(boost::math::normal(a, b), p));
    }
    case Kind::Constant:
    default:
      return a;
  }
}

bool ParamDistribution::strictly_positive() const {
  switch (kind) {
    case Kind::Uniform:
      return a > 0.0 && b >= a && std::isfinite(b);
    case Kind::LogNormal:
      return std::isfinite(a) && b >= 0.0 && std::isfinite(b);
    case Kind::Constant:
    default:
      return a > 0.0 && std::isfinite(a);
  }
}

Matrix leslie_matrix(const Vector& fertility, const Vector& survival) {
  const Eigen::Index n = fertility.size();
  if (n < 2) throw PreconditionError("leslie: need N >= 2 age classes");
  if (survival.size() != n - 1) throw DimensionError("leslie: need N-1 survival rates");
  Matrix s = Matrix::Zero(n, n);
  s.row(0) = fertility.transpose();
  for (Eigen::Index j = 0; j + 1 < n; ++j) s(j + 1, j) = survival[j];
  return s;
}

MatrixModel leslie_model(const std::vector<ParamDistribution>& fertility,
                         const std::vector<ParamDistribution>& survival) {
  const std::size_t n = fertility.size();
  if (n < 2) throw PreconditionError("leslie: need N >= 2 age classes");
  if (survival.size() != n - 1) throw DimensionError("leslie: need N-1 survival laws");
  for (std::size_t j = 0; j < n; ++j) {
    if (!fertility[j].strictly_positive()) {
      throw PreconditionError("leslie: fertility m" + std::to_string(j + 1) + " may be nonpositive");
    }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!survival[j].strictly_positive()) {
      throw PreconditionError("leslie: survival b" + std::to_string(j + 1) + " may be nonpositive");
    }
  }
  const bool constant =
      std::all_of(fertility.begin(), fertility.end(), [](const auto& d) { return d.kind == ParamDistribution::Kind::Constant; }) &&
      std::all_of(survival.begin(), survival.end(), [](const auto& d) { return d.kind == ParamDistribution::Kind::Constant; });

  return MatrixModel(
      static_cast<int>(n), Driver::iid(),
      [fertility, survival, n](const DriverState& omega) {
        const auto& s = std::get<ShiftState>(omega);
        Vector m(static_cast<Eigen::Index>(n));
        Vector b(static_cast<Eigen::Index>(n - 1));
        for (std::size_t j = 0; j < n; ++j) m[static_cast<Eigen::Index>(j)] = fertility[j].draw(Driver::uniform(s, j));
        for (std::size_t j = 0; j + 1 < n; ++j) {
          b[static_cast<Eigen::Index>(j)] = survival[j].draw(Driver::uniform(s, n + j));
        }
        if ((m.array() <= 0.0).any() || (b.array() <= 0.0).any()) {
          throw PreconditionError("leslie: nonpositive parameter draw");
        }
        return leslie_matrix(m, b);
      },
      constant, "leslie");
}

NStepPositivity leslie_nstep_positive(const MatrixModel& model, std::uint64_t seed, int n_samples) {
  if (n_samples < 1) throw PreconditionError("leslie_nstep_positive: n_samples must be >= 1");
  NStepPositivity out;
  out.n_samples = n_samples;
  out.min_entry = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    const Matrix p = lag_product(model, sample_point(model.driver(), seed, static_cast<std::uint64_t>(k)), model.dim());
    const double mn = p.minCoeff();
    out.min_entry = std::min(out.min_entry, mn);
    if (!(mn > 0.0)) {
      out.all_positive = false;
      ++out.failures;
      if (out.first_failing_sample < 0) out.first_failing_sample = k;
    }
  }
  return out;
}

}  // namespace posdyn
