#pragma once

// A common interface over discrete matrix cocycles and ODE flows, and over
// their duals, so that the estimators are written once.

#include <memory>
#include <string>

#include "posdyn/integrator.hpp"
#include "posdyn/matrix_model.hpp"
#include "posdyn/ode_model.hpp"
#include "posdyn/order.hpp"

namespace posdyn {

class Cocycle {
 public:
  virtual ~Cocycle() = default;

  virtual int dim() const = 0;
  virtual bool discrete() const = 0;
  virtual const Driver& driver() const = 0;
  virtual const Cone& cone() const = 0;
  virtual bool is_dual() const = 0;
  virtual std::string describe() const = 0;

  /// x <- U_omega(t) x column by column, t >= 0 (integer for discrete
  /// cocycles). The columns share one rescaling; its log is returned.
  virtual double apply(const DriverState& omega, double t, Matrix& x) const = 0;

  /// Base point reached after time t: theta_t omega, or theta_{-t} omega for
  /// a dual cocycle. t may be negative.
  virtual DriverState shift(const DriverState& omega, double t) const = 0;

  /// U*_omega(t) = U_{theta_{-t} omega}(t)^T over the reversed base. The dual
  /// of a dual is the primal.
  virtual std::unique_ptr<Cocycle> dual() const = 0;
};

class MatrixCocycle final : public Cocycle {
 public:
  explicit MatrixCocycle(MatrixModel model, bool dual = false, Cone cone = Cone::standard());

  int dim() const override { return model_.dim(); }
  bool discrete() const override { return true; }
  const Driver& driver() const override { return model_.driver(); }
  const Cone& cone() const override { return cone_; }
  bool is_dual() const override { return dual_; }
  std::string describe() const override;

  double apply(const DriverState& omega, double t, Matrix& x) const override;
  DriverState shift(const DriverState& omega, double t) const override;
  std::unique_ptr<Cocycle> dual() const override;

  const MatrixModel& model() const { return model_; }

 private:
  MatrixModel model_;
  bool dual_;
  Cone cone_;
};

class OdeCocycle final : public Cocycle {
 public:
  explicit OdeCocycle(OdeModel model, bool dual = false, IntegratorOptions opts = {});

  int dim() const override { return model_.dim(); }
  bool discrete() const override { return false; }
  const Driver& driver() const override { return model_.driver(); }
  const Cone& cone() const override { return model_.cone(); }
  bool is_dual() const override { return dual_; }
  std::string describe() const override;

  double apply(const DriverState& omega, double t, Matrix& x) const override;
  DriverState shift(const DriverState& omega, double t) const override;
  std::unique_ptr<Cocycle> dual() const override;

  const OdeModel& model() const { return model_; }
  const IntegratorOptions& options() const { return opts_; }

 private:
  OdeModel model_;
  bool dual_;
  IntegratorOptions opts_;
};

}  // namespace posdyn
