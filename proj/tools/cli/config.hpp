#pragma once

// Run configuration: a JSON document with driver, model, estimator and
// output blocks. See docs/config.md for the grammar.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "posdyn/cocycle.hpp"
#include "posdyn/leslie.hpp"
#include "posdyn/torus_example.hpp"

namespace posdyn::cli {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { Matrix, Ode, Leslie, TorusExample };

struct EstimatorConfig {
  double horizon = 1000.0;
  double dt = 0.1;
  double warmup = 50.0;
  int batches = 20;
  int samples = 1;
  double divergence_threshold = -10.0;
  std::int64_t orbit_depth = 20;
  bool kappa = false;  // also run the kappa route (ODE models)
  int check_samples = 50;
  // example-torus overrides
  double propagator_tol = 1e-8;
  double w_tol = 1e-6;
  double sigma_lo = 1.9;
  double sigma_hi = 2.1;
  int ladder_samples = 100;
};

struct OutputConfig {
  std::string dir = "posdyn-out";
  bool series_csv = true;
  bool plot_csv = true;
};

struct RunConfig {
  std::uint64_t seed = 1;
  ModelKind kind = ModelKind::Matrix;
  std::optional<MatrixModel> matrix;
  std::optional<OdeModel> ode;
  double rho = kDefaultRho;  // torus-example
  EstimatorConfig estimator;
  OutputConfig output;
  json echo;  // the parsed document, echoed into results.json
};

/// Parses and validates a configuration document.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::string& path);

/// Cocycle for the configured model (matrix and Leslie models are discrete).
std::unique_ptr<Cocycle> make_cocycle(const RunConfig& cfg);

std::string to_string(ModelKind k);

}  // namespace posdyn::cli
