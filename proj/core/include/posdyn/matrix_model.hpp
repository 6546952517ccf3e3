#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "posdyn/drivers.hpp"
#include "posdyn/types.hpp"

namespace posdyn {

/// Generator of a discrete-time cocycle: omega -> S(omega), with
/// U_omega(1) = S(omega). The emitter must be a pure function of the state.
class MatrixModel {
 public:
  using Emitter = std::function<Matrix(const DriverState&)>;

  MatrixModel(int dim, Driver driver, Emitter emit, bool constant = false, std::string description = "matrix");

  static MatrixModel constant(const Matrix& s);
  /// S(omega) drawn from `matrices` with the given weights, independently per step.
  static MatrixModel iid_list(std::vector<Matrix> matrices, std::vector<double> weights);
  /// Entry (i, j) uniform on [low(i, j), high(i, j)], independently per step.
  static MatrixModel iid_uniform_entries(const Matrix& low, const Matrix& high);
  /// S(omega) = matrices[chain state] for a stationary Markov driver.
  static MatrixModel markov_list(const Matrix& transition, std::vector<Matrix> matrices);

  int dim() const { return dim_; }
  const Driver& driver() const { return driver_; }
  bool is_constant() const { return constant_; }
  const std::string& description() const { return description_; }

  Matrix emit(const DriverState& omega) const;

 private:
  int dim_;
  Driver driver_;
  Emitter emit_;
  bool constant_;
  std::string description_;
};

/// Index drawn from a discrete law given by nonnegative weights.
std::size_t categorical(std::span<const double> cumulative, double u);

}  // namespace posdyn
