#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace posdyn::cli {

enum class Command { Check, Estimate, Separate, Orbit, Oseledets, ExampleTorus, LeslieDemo };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<std::string> out;
  std::optional<double> rho;
  std::optional<double> dt;
  std::optional<int> samples;
  std::optional<double> propagator_tol;
  std::optional<double> direction_tol;
  std::optional<double> sigma_low;
  std::optional<double> sigma_high;
};

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kConfigError = 1, kAssumptionFailure = 2, kNumericalFailure = 3 };

/// Extra files produced next to results.json.
struct Artifact {
  std::string name;
  std::string text;
};

struct PipelineOutput {
  json result;  // results.json content
  std::vector<Artifact> artifacts;
  int exit_code = kOk;
};

/// The built-in configuration used by leslie-demo and example-torus when no
/// --config is given.
json default_config(Command c);

/// Applies overrides; throws ConfigError when one does not fit the model.
RunConfig apply_overrides(RunConfig cfg, const Overrides& o);

/// Runs the pipeline without touching the file system. Library errors
/// propagate to the caller.
PipelineOutput run_pipeline(Command c, const RunConfig& cfg);

/// Output directory: --out, then POSDYN_OUT_DIR, then output.dir.
std::string output_dir(const RunConfig& cfg, const Overrides& o);

/// Full run: parse, execute, write results.json (plus timing.json and CSV
/// files) and map errors onto exit codes. Diagnostics go to err.
int run(Command c, const std::optional<std::string>& config_path, const Overrides& o, std::ostream& err);

}  // namespace posdyn::cli
