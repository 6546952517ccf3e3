#include "posdyn/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace posdyn {

Cone Cone::type_k(int k, int l) {
  if (k < 1 || l < 1) {
    throw PreconditionError("type-K cone needs k >= 1 and l >= 1, got k=" + std::to_string(k) +
                            " l=" + std::to_string(l));
  }
  return Cone(ConeKind::TypeK, k, l);
}

void Cone::check_dim(Eigen::Index n) const {
  if (kind_ == ConeKind::TypeK && n != k_ + l_) {
    throw DimensionError("vector of size " + std::to_string(n) + " does not match type-K cone with k+l=" +
                         std::to_string(k_ + l_));
  }
}

Vector Cone::sign_vector(int n) const {
  check_dim(n);
  Vector s(n);
  for (int i = 0; i < n; ++i) s[i] = sign(i);
  return s;
}

Vector Cone::interior_unit(int n) const { return sign_vector(n) / std::sqrt(static_cast<double>(n)); }

double norm(const Vector& u, NormTag p) {
  switch (p) {
    case NormTag::L1:
      return u.lpNorm<1>();
    case NormTag::Linf:
      return u.size() == 0 ? 0.0 : u.lpNorm<Eigen::Infinity>();
    case NormTag::L2:
    default:
      return u.norm();
  }
}

bool cone_contains(const Vector& u, const Cone& c) {
  c.check_dim(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (c.sign(static_cast<int>(i)) * u[i] < 0.0) return false;
  }
  return true;
}

bool cone_interior_contains(const Vector& u, const Cone& c) {
  c.check_dim(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(c.sign(static_cast<int>(i)) * u[i] > 0.0)) return false;
  }
  return true;
}

bool cone_contains_tol(const Vector& u, const Cone& c, double tol) {
  c.check_dim(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (c.sign(static_cast<int>(i)) * u[i] < -tol) return false;
  }
  return true;
}

PositiveParts positive_decompose(const Vector& u) {
  return {u.cwiseMax(0.0), (-u).cwiseMax(0.0)};
}

std::optional<Comparability> comparable(const Vector& u, const Vector& v, const Cone& c) {
  if (u.size() != v.size()) throw DimensionError("comparable: size mismatch");
  if (u.isZero(0.0) || v.isZero(0.0)) throw PreconditionError("comparable: zero vector");
  if (!cone_contains(u, c) || !cone_contains(v, c)) throw PreconditionError("comparable: vector outside cone");

  // In the flipped coordinates both vectors are componentwise nonnegative.
  const Vector s = c.sign_vector(static_cast<int>(u.size()));
  const Vector uu = s.cwiseProduct(u);
  const Vector vv = s.cwiseProduct(v);

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index i = 0; i < uu.size(); ++i) {
    const bool up = uu[i] > 0.0;
    const bool vp = vv[i] > 0.0;
    if (up != vp) return std::nullopt;
    if (!vp) continue;
    const double r = uu[i] / vv[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return Comparability{lo, hi};
}

}  // namespace posdyn
