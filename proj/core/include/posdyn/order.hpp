#pragma once

// Ordered linear algebra on R^N: the standard cone, type-K cones,
// monotonic l_p norms and the lattice decomposition u = u+ - u-.

#include <optional>

#include "posdyn/types.hpp"

namespace posdyn {

enum class ConeKind { Standard, TypeK };

/// Solid, normal, reproducing cone in R^N.
///
/// Standard is {u : u_i >= 0}. TypeK(k, l) is {u : u_1..u_k >= 0,
/// u_{k+1}..u_{k+l} <= 0}. A standard cone is dimension-agnostic; a type-K
/// cone fixes N = k + l.
class Cone {
 public:
  static Cone standard() { return Cone(ConeKind::Standard, 0, 0); }
  static Cone type_k(int k, int l);

  ConeKind kind() const { return kind_; }
  int k() const { return k_; }
  int l() const { return l_; }

  /// +1 for coordinates constrained to be >= 0, -1 for those <= 0.
  double sign(int i) const { return (kind_ == ConeKind::TypeK && i >= k_) ? -1.0 : 1.0; }

  /// Diagonal of the sign flip D that maps this cone onto the standard one.
  Vector sign_vector(int n) const;

  /// The unit vector (sign_1, ..., sign_N) / sqrt(N) in the cone interior.
  Vector interior_unit(int n) const;

  /// Throws DimensionError when a vector of size n cannot live in this cone.
  void check_dim(Eigen::Index n) const;

  bool operator==(const Cone&) const = default;

 private:
  Cone(ConeKind kind, int k, int l) : kind_(kind), k_(k), l_(l) {}
  ConeKind kind_;
  int k_;
  int l_;
};

enum class NormTag { L1, L2, Linf };

double norm(const Vector& u, NormTag p = NormTag::L2);

/// Exact sign check; tolerance policy belongs to callers.
bool cone_contains(const Vector& u, const Cone& c);

/// Strict sign check in every coordinate.
bool cone_interior_contains(const Vector& u, const Cone& c);

/// Like cone_contains but allows each coordinate to miss by tol.
bool cone_contains_tol(const Vector& u, const Cone& c, double tol);

struct PositiveParts {
  Vector plus;
  Vector minus;
};

/// u+ = max(u, 0), u- = max(-u, 0) componentwise.
PositiveParts positive_decompose(const Vector& u);

struct Comparability {
  double alpha_lo;
  double alpha_hi;
};

/// Tightest alpha_lo, alpha_hi > 0 with alpha_lo v <= u <= alpha_hi v in the
/// order of c, or nullopt when u is not in the component C_v.
/// Throws PreconditionError for zero vectors or vectors outside c.
std::optional<Comparability> comparable(const Vector& u, const Vector& v, const Cone& c);

}  // namespace posdyn
