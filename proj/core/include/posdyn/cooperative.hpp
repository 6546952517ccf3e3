#pragma once

// Checkers for cooperative linear ODE systems: off-diagonal sign pattern,
// integrability of the largest coefficient, the irreducibility quantities
// behind the time-1 focusing bounds, the l1 growth bound, the kappa
// functional and the type-K to cooperative change of variables.

#include <cstdint>
#include <optional>
#include <vector>

#include "posdyn/ode_model.hpp"
#include "posdyn/statistics.hpp"

namespace posdyn {

struct OdeCheckOptions {
  std::uint64_t seed = 1;
  int n_samples = 50;
  int t_grid = 32;  // evaluation times per unit interval
};

/// Cooperativity of D A D for the model's cone sign flip D (off-diagonal
/// entries >= 0); for the standard cone this is a_ij >= 0, i != j, and for a
/// type-K cone it is the type-K sign pattern. Checked on sampled omega and
/// a grid of t in [0, 1].
AssumptionReport check_O1(const OdeModel& model, const OdeCheckOptions& opts = {});

/// Mean and CI of omega -> max_ij a_ij(omega); for type-K cones the
/// integrand is max_ij |a_ij|.
AssumptionReport check_O2(const OdeModel& model, const OdeCheckOptions& opts = {});

struct IrreducibilityQuantities {
  Vector a_tilde;          // min_{t in [0,1]} int_0^t a_ii
  Matrix a_bar;            // min_{s in [0,1]} int_s^1 a_ij
  Matrix entry_min;        // min over the grid of a_ij(theta_t omega), t in [0, 1]
  std::vector<std::vector<int>> chains;  // chains[i] starts at i, 0-based
  double delta = 0.0;
  double delta_tilde = 0.0;  // min off-diagonal entry; <= 0 when (O3)' (i) fails
  Vector beta_i;
  double beta_lower = 0.0;
  double beta_upper = 0.0;
  Vector beta_tilde_i;       // empty when delta_tilde <= 0
  double beta_tilde_lower = 0.0;
  int grid_per_unit = 0;
  bool grid_converged = false;
};

/// Quantities of the irreducibility conditions at omega. A chain j_1 = i,
/// j_2, ..., j_N is admissible when it visits every index once and
/// a_{j_{l+1} j_l}(theta_t omega) >= delta on [0, 1]. Chains left empty are
/// searched greedily on the support graph of entry_min; without an explicit
/// delta the smallest link of the chosen chains is used.
/// Errors: delta <= 0 (explicit or found), chains not covering {0..N-1},
/// or an explicit delta above a chain's smallest link.
IrreducibilityQuantities irreducibility_quantities(const OdeModel& model, const DriverState& omega,
                                                   std::optional<double> delta = std::nullopt,
                                                   std::vector<std::vector<int>> chains = {});

/// O3.i-iv and O3'.i-iv on sampled omega.
std::vector<AssumptionReport> check_O3(const OdeModel& model, const OdeCheckOptions& opts = {});

/// ln of exp(int_0^t sum_i max_j a_ij(theta_tau omega) dtau), by adaptive
/// Gauss-Kronrod quadrature on each smooth piece.
double l1_growth_log_bound(const OdeModel& model, const DriverState& omega, double t);
double l1_growth_bound(const OdeModel& model, const DriverState& omega, double t);

/// <A w, w>; w must have unit Euclidean norm (tolerance 1e-10).
double kappa_functional(const Matrix& a, const Vector& w);

/// A = D B D with D = diag(1_k, -1_l): entries on the diagonal blocks are
/// kept, entries on the off-diagonal blocks change sign. Solutions are
/// exactly conjugate: v(t) = D u(t). Throws PositivityViolation with a sign
/// witness when the type-K pattern fails on sampled omega.
OdeModel typek_to_cooperative(const OdeModel& b_model, int k, int l, const OdeCheckOptions& opts = {});

}  // namespace posdyn
