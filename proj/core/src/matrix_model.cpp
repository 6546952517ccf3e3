#include "posdyn/matrix_model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <span>

namespace posdyn {
namespace {

void require_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": non-finite entry");
}

std::vector<double> cumulative_weights(const std::vector<double>& weights, std::size_t count) {
  if (weights.size() != count) throw DimensionError("iid list: weights and matrices differ in length");
  std::vector<double> cum(count);
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw PreconditionError("iid list: negative weight");
    acc += weights[i];
    cum[i] = acc;
  }
  if (!(acc > 0.0)) throw PreconditionError("iid list: weights sum to zero");
  for (double& c : cum) c /= acc;
  return cum;
}

}  // namespace

std::size_t categorical(std::span<const double> cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

MatrixModel::MatrixModel(int dim, Driver driver, Emitter emit, bool constant, std::string description)
    : dim_(dim), driver_(std::move(driver)), emit_(std::move(emit)), constant_(constant), description_(std::move(description)) {
  if (dim_ < 1) throw PreconditionError("matrix model: dimension must be positive");
  if (!driver_.discrete()) throw PreconditionError("matrix model: needs a discrete-time driver");
}

Matrix MatrixModel::emit(const DriverState& omega) const {
  Matrix s = emit_(omega);
  if (s.rows() != dim_ || s.cols() != dim_) throw DimensionError("matrix model emitted a matrix of the wrong size");
  if (!s.allFinite()) throw NumericalFailure("matrix model emitted a non-finite entry");
  return s;
}

MatrixModel MatrixModel::constant(const Matrix& s) {
  const int n = static_cast<int>(s.rows());
  require_square(s, n, "constant model");
  return MatrixModel(n, Driver::iid(), [s](const DriverState&) { return s; }, true, "constant");
}

MatrixModel MatrixModel::iid_list(std::vector<Matrix> matrices, std::vector<double> weights) {
  if (matrices.empty()) throw PreconditionError("iid list: no matrices");
  const int n = static_cast<int>(matrices.front().rows());
  for (const auto& m : matrices) require_square(m, n, "iid list");
  auto cum = cumulative_weights(weights, matrices.size());
  auto shared = std::make_shared<const std::vector<Matrix>>(std::move(matrices));
  const bool single = shared->size() == 1;
  return MatrixModel(
      n, Driver::iid(),
      [shared, cum = std::move(cum)](const DriverState& omega) {
        const auto& s = std::get<ShiftState>(omega);
        return (*shared)[categorical(cum, Driver::uniform(s, 0))];
      },
      single, "iid-list");
}

MatrixModel MatrixModel::iid_uniform_entries(const Matrix& low, const Matrix& high) {
  const int n = static_cast<int>(low.rows());
  require_square(low, n, "iid uniform entries (low)");
  require_square(high, n, "iid uniform entries (high)");
  if (((high - low).array() < 0.0).any()) throw PreconditionError("iid uniform entries: high < low");
  return MatrixModel(
      n, Driver::iid(),
      [low, high, n](const DriverState& omega) {
        const auto& s = std::get<ShiftState>(omega);
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double u = Driver::uniform(s, static_cast<std::uint64_t>(i * n + j));
            m(i, j) = low(i, j) + (high(i, j) - low(i, j)) * u;
          }
        }
        return m;
      },
      low == high, "iid-uniform-entries");
}

MatrixModel MatrixModel::markov_list(const Matrix& transition, std::vector<Matrix> matrices) {
  if (static_cast<Eigen::Index>(matrices.size()) != transition.rows()) {
    throw DimensionError("markov list: one matrix per chain state required");
  }
  const int n = static_cast<int>(matrices.front().rows());
  for (const auto& m : matrices) require_square(m, n, "markov list");
  auto shared = std::make_shared<const std::vector<Matrix>>(std::move(matrices));
  return MatrixModel(
      n, Driver::markov(transition),
      [shared](const DriverState& omega) {
        return (*shared)[static_cast<std::size_t>(std::get<ShiftState>(omega).chain_state)];
      },
      shared->size() == 1, "markov-list");
}

}  // namespace posdyn
