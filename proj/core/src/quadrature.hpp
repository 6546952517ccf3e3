#pragma once

// Internal: adaptive Gauss-Kronrod with a mixed relative/absolute stopping
// rule. Boost's adaptive driver stops only on error <= tol * L1, which never
// triggers on pieces where the integrand nearly cancels.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace posdyn::detail {

struct QuadTol {
  double rel = 1e-10;
  double abs_per_length = 1e-13;
  int max_intervals = 4000;
};

// Global adaptive scheme: bisect the interval with the largest error estimate
// until the summed error meets the goal for the whole range. A per-interval
// relative goal is unattainable near zero crossings of the integrand.
template <typename F>
double adaptive_gk(F& f, double a, double b, const QuadTol& tol) {
  struct Seg {
    double a, b, r, err, l1;
    bool operator<(const Seg& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    Seg s{lo, hi, 0.0, 0.0, 0.0};
    s.r = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &s.err, &s.l1);
    return s;
  };
  std::priority_queue<Seg> heap;
  heap.push(eval(a, b));
  double total = heap.top().r, err = heap.top().err, l1 = heap.top().l1;
  // The Kronrod estimate never drops below ~50 eps L1; asking for less only
  // bisects rounding noise.
  auto goal = [&] {
    return std::max({tol.rel * std::abs(total), tol.abs_per_length * (b - a),
                     100.0 * std::numeric_limits<double>::epsilon() * l1});
  };
  while (err > goal() && static_cast<int>(heap.size()) < tol.max_intervals) {
    const Seg worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    // Below ~1e-13 relative width the abscissae themselves are noise.
    if (worst.b - worst.a < 1e-13 * std::max(1.0, std::abs(worst.b))) break;
    heap.pop();
    const Seg left = eval(worst.a, m), right = eval(m, worst.b);
    total += left.r + right.r - worst.r;
    err += left.err + right.err - worst.err;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  while (!heap.empty()) {
    total += heap.top().r;
    heap.pop();
  }
  return total;
}

/// Margin kept from the ends of a smooth piece [a, b] so that the state at
/// a + margin is unambiguously past the discontinuity at a.
inline double piece_margin(double a, double b) { return std::min(1e-12 * std::max(1.0, std::abs(b)), (b - a) / 4.0); }

/// Integral of g over a smooth piece of length len, where g takes the offset
/// from the state at (piece start + margin) and is sampled in
/// [0, len - 2 margin]. Offsets are local, so steep peaks at the start of a
/// piece are resolved without absolute-time rounding.
template <typename G>
double piece_integral(G&& g, double len, double margin, const QuadTol& tol = {}) {
  if (!(len > 0.0)) return 0.0;
  const double hi = len - 2.0 * margin;
  auto local = [&](double s) { return g(std::clamp(s - margin, 0.0, hi)); };
  return adaptive_gk(local, 0.0, len, tol);
}

/// Integral over a smooth piece [a, b] for callers whose abscissae are
/// already local; f is sampled at least a margin inside the piece.
template <typename F>
double smooth_piece_integral(F&& g, double a, double b, const QuadTol& tol = {}) {
  if (!(b > a)) return 0.0;
  const double eps = piece_margin(a, b);
  auto clamped = [&](double t) { return g(std::clamp(t, a + eps, b - eps)); };
  return adaptive_gk(clamped, a, b, tol);
}

}  // namespace posdyn::detail
