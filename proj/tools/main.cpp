// posdyn: positivity checks and Floquet/Lyapunov estimates for random
// matrix and cooperative ODE cocycles.

#include <iostream>

#include "CLI11.hpp"
#include "cli/pipelines.hpp"

namespace {

void add_common(CLI::App* sub, std::optional<std::string>& config, posdyn::cli::Overrides& o) {
  sub->add_option("--config", config, "JSON run configuration");
  sub->add_option("--seed", o.seed, "Seed for sampled omega (overrides config)");
  sub->add_option("--horizon", o.horizon, "Estimation horizon T (overrides config)");
  sub->add_option("--out", o.out, "Output directory (overrides POSDYN_OUT_DIR and config)");
  sub->add_option("--dt", o.dt, "Step for flows");
  sub->add_option("--samples", o.samples, "Number of sampled omega");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace posdyn::cli;
  CLI::App app{"Positive random dynamical systems: assumption checks and exponent estimates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", POSDYN_VERSION);

  std::optional<std::string> config;
  Overrides o;

  const std::pair<Command, const char*> subs[] = {
      {Command::Check, "Check the positivity, focusing and irreducibility conditions"},
      {Command::Estimate, "Principal exponent with CI and divergence diagnostic"},
      {Command::Separate, "Exponential separation: lambda1, lambda2, sigma and series CSV"},
      {Command::Orbit, "Backward entire positive orbit and its depth convergence"},
      {Command::Oseledets, "QR Lyapunov spectrum"},
      {Command::ExampleTorus, "Validate the generic pipeline against the closed-form torus example"},
      {Command::LeslieDemo, "Leslie model demo (Fibonacci-Leslie by default)"},
  };
  std::vector<std::pair<Command, CLI::App*>> registered;
  for (const auto& [cmd, help] : subs) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    add_common(sub, config, o);
    if (cmd == Command::ExampleTorus) {
      sub->add_option("--rho", o.rho, "Rotation number in (0, 1)");
      sub->add_option("--propagator-tol", o.propagator_tol, "Relative log-scale tolerance for (a)");
      sub->add_option("--direction-tol", o.direction_tol, "Tolerance on w for (b)");
      sub->add_option("--sigma-low", o.sigma_low, "Lower end of the accepted sigma range");
      sub->add_option("--sigma-high", o.sigma_high, "Upper end of the accepted sigma range");
    }
    registered.emplace_back(cmd, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  for (const auto& [cmd, sub] : registered) {
    if (sub->parsed()) return run(cmd, config, o, std::cerr);
  }
  return kConfigError;
}
