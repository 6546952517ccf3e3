#pragma once

// results.json, series CSV and tidy plot CSV writers. Every float is written
// with 17 significant digits; non-finite values become the strings "inf",
// "-inf" and "nan".

#include <string>
#include <vector>

#include "config.hpp"
#include "posdyn/estimators.hpp"

namespace posdyn::cli {

/// Serializes j with two-space indentation and %.17g floats.
std::string dump(const json& j);

/// A float as a JSON value: a number, or a string for inf and nan.
json number(double x);
json vector(const Vector& v);
json matrix(const Matrix& m);

/// Writes text to path, creating parent directories. Single writer per path.
void write_file(const std::string& path, const std::string& text);

/// Time series: t, ln_rho, w_1..w_N, ln_proj_norm.
std::string series_csv(const SeparationEstimate& est);

/// Tidy plot data (series, t, value): running lambda1 estimate against t and
/// ln |u(t)/|u(t)| - w(theta_t omega)| for a forward run from u0.
/// Throws PreconditionError when the history is empty.
std::string plot_csv(const SeparationEstimate& est, const FloquetTrack& from_u0);

std::string format_double(double x);

}  // namespace posdyn::cli
