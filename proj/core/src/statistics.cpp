#include "posdyn/statistics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "posdyn/types.hpp"

namespace posdyn {

Estimate mean_ci(std::span<const double> samples) {
  Estimate e;
  e.n = samples.size();
  if (samples.empty()) {
    e.mean = std::numeric_limits<double>::quiet_NaN();
    e.half_width = std::numeric_limits<double>::infinity();
    return e;
  }
  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : samples) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  e.mean = mean;
  if (k < 2) {
    e.half_width = std::numeric_limits<double>::infinity();
    return e;
  }
  const double var = m2 / static_cast<double>(k - 1);
  if (!std::isfinite(var)) {
    e.half_width = std::numeric_limits<double>::infinity();
    return e;
  }
  const boost::math::students_t dist(static_cast<double>(k - 1));
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  e.half_width = q * std::sqrt(var / static_cast<double>(k));
  return e;
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fitted_slope: size mismatch");
  if (x.size() < 2) throw PreconditionError("fitted_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw PreconditionError("fitted_slope: degenerate abscissae");
  return sxy / sxx;
}

double log_plus(double x) {
  if (x <= 1.0) return 0.0;
  return std::log(x);
}

double log_minus(double x) {
  if (x <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(-std::log(x), 0.0);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Empirical:
    default:
      return "empirical";
  }
}

}  // namespace posdyn
