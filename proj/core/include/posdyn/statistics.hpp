#pragma once

#include <span>
#include <string>
#include <vector>

namespace posdyn {

/// Mean with a two-sided 95% Student-t confidence half-width.
struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

/// Estimate from independent samples. With n == 1 the half-width is +inf.
Estimate mean_ci(std::span<const double> samples);

/// Batch-means estimate: the samples are consecutive batch means of one
/// stationary run and are treated as approximately independent.
inline Estimate batch_means_ci(std::span<const double> batch_means) { return mean_ci(batch_means); }

/// Least-squares slope of y against x.
double fitted_slope(std::span<const double> x, std::span<const double> y);

/// ln+(x) = max(ln x, 0) and ln-(x) = max(-ln x, 0) for x >= 0;
/// ln+(0) = 0, ln-(0) = +inf.
double log_plus(double x);
double log_minus(double x);

enum class Verdict { Holds, Fails, Empirical };

std::string to_string(Verdict v);

struct Witness {
  std::string what;
  int sample = -1;
  int row = -1;
  int col = -1;
  double time = 0.0;
  double value = 0.0;
};

/// Outcome of one assumption check. Integrability conditions can only be
/// estimated from samples and are reported as Empirical with an estimate.
struct AssumptionReport {
  std::string id;
  Verdict verdict = Verdict::Empirical;
  std::string note;
  bool has_estimate = false;
  Estimate estimate;
  std::vector<Witness> witnesses;
};

}  // namespace posdyn
