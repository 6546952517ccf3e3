#include "pipelines.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "output.hpp"
#include "posdyn/cooperative.hpp"
#include "posdyn/matrix_cocycle.hpp"

#ifndef POSDYN_VERSION
#define POSDYN_VERSION "0.0.0"
#endif

namespace posdyn::cli {
namespace {

const std::pair<Command, const char*> kCommands[] = {
    {Command::Check, "check"},          {Command::Estimate, "estimate"},
    {Command::Separate, "separate"},    {Command::Orbit, "orbit"},
    {Command::Oseledets, "oseledets"},  {Command::ExampleTorus, "example-torus"},
    {Command::LeslieDemo, "leslie-demo"},
};

json estimate_json(const Estimate& e) { return {{"mean", number(e.mean)}, {"half_width", number(e.half_width)}, {"n", e.n}}; }

json ladder_json(const DivergenceLadder& l) {
  json h = json::array(), m = json::array(), w = json::array();
  for (double x : l.horizons) h.push_back(number(x));
  for (double x : l.means) m.push_back(number(x));
  for (double x : l.half_widths) w.push_back(number(x));
  return {{"horizons", h},
          {"means", m},
          {"half_widths", w},
          {"threshold", number(l.threshold)},
          {"strictly_decreasing", l.strictly_decreasing},
          {"below_threshold", l.below_threshold},
          {"diverging", l.diverging}};
}

json report_json(const AssumptionReport& r) {
  json j = {{"id", r.id}, {"verdict", to_string(r.verdict)}, {"note", r.note}};
  if (r.has_estimate) j["estimate"] = estimate_json(r.estimate);
  json ws = json::array();
  for (const auto& w : r.witnesses) {
    ws.push_back({{"what", w.what}, {"sample", w.sample}, {"row", w.row}, {"col", w.col}, {"time", number(w.time)},
                  {"value", number(w.value)}});
  }
  j["witnesses"] = ws;
  return j;
}

// Positive starting vector for plot data, a pure function of (seed, sample).
Vector random_start(const Cone& cone, int n, std::uint64_t seed, std::int64_t sample) {
  Vector u(n);
  for (int i = 0; i < n; ++i) {
    u[i] = cone.sign(i) * (0.05 + counter_uniform(mix64(seed ^ 0x5eedULL), sample, static_cast<std::uint64_t>(i)));
  }
  return u / u.norm();
}

std::string tag(const RunConfig& cfg, int k) {
  return "seed" + std::to_string(cfg.seed) + "_sample" + std::to_string(k);
}

json sample_header(const RunConfig& cfg, int k, double horizon) {
  return {{"seed", cfg.seed}, {"sample", k}, {"horizon", number(horizon)}};
}

DriverState omega_of(const Cocycle& c, const RunConfig& cfg, int k) {
  return sample_point(c.driver(), cfg.seed, static_cast<std::uint64_t>(k));
}

json aggregate(const std::vector<double>& xs) {
  if (xs.size() < 2) return json(nullptr);
  return estimate_json(mean_ci(xs));
}

PipelineOutput run_check(const RunConfig& cfg) {
  PipelineOutput out;
  json reports = json::array();
  bool hard_failure = false;
  auto add = [&](const AssumptionReport& r) {
    reports.push_back(report_json(r));
    if ((r.id == "D1.i" || r.id == "O1") && r.verdict == Verdict::Fails) hard_failure = true;
  };
  json extra = json::object();
  if (cfg.matrix) {
    MatrixCheckOptions o;
    o.seed = cfg.seed;
    o.n_samples = cfg.estimator.check_samples;
    for (const auto& r : check_D1(*cfg.matrix, o)) add(r);
    for (const auto& r : check_D2(*cfg.matrix, o)) add(r);
    for (const auto& r : check_D3(*cfg.matrix, o)) add(r);
    if (cfg.kind == ModelKind::Leslie) {
      const auto p = leslie_nstep_positive(*cfg.matrix, cfg.seed, cfg.estimator.check_samples);
      extra["leslie_nstep"] = {{"steps", cfg.matrix->dim()},
                               {"all_positive", p.all_positive},
                               {"n_samples", p.n_samples},
                               {"failures", p.failures},
                               {"first_failing_sample", p.first_failing_sample},
                               {"min_entry", number(p.min_entry)}};
    }
  } else {
    OdeCheckOptions o;
    o.seed = cfg.seed;
    o.n_samples = cfg.estimator.check_samples;
    add(check_O1(*cfg.ode, o));
    add(check_O2(*cfg.ode, o));
    for (const auto& r : check_O3(*cfg.ode, o)) add(r);
  }
  out.result = {{"reports", reports}, {"hard_failure", hard_failure}};
  for (auto& [k, v] : extra.items()) out.result[k] = v;
  out.exit_code = hard_failure ? kAssumptionFailure : kOk;
  return out;
}

PipelineOutput run_estimate(const RunConfig& cfg) {
  const auto c = make_cocycle(cfg);
  const auto& e = cfg.estimator;
  Lambda1Options lo;
  lo.horizon = e.horizon;
  lo.warmup = e.warmup;
  lo.dt = e.dt;
  lo.batches = e.batches;
  lo.divergence_threshold = e.divergence_threshold;
  json samples = json::array();
  std::vector<double> hats;
  for (int k = 0; k < e.samples; ++k) {
    const DriverState omega = omega_of(*c, cfg, k);
    const Lambda1Estimate est = estimate_lambda1(*c, omega, lo);
    json s = sample_header(cfg, k, e.horizon);
    s["lambda1_hat"] = number(est.lambda1_hat);
    s["ci"] = estimate_json(est.ci);
    s["diverging"] = est.ladder.diverging;
    s["ladder"] = ladder_json(est.ladder);
    s["w"] = vector(est.w_start);
    s["w_end"] = vector(est.track.w);
    if (e.kappa && cfg.ode) {
      KappaOptions ko;
      ko.warmup = e.warmup;
      ko.dt = e.dt;
      ko.batches = e.batches;
      const KappaEstimate ke = lambda1_via_kappa(*cfg.ode, omega, e.horizon, ko);
      s["lambda1_via_kappa"] = {{"lambda1", number(ke.lambda1)}, {"ci", estimate_json(ke.ci)}};
    }
    hats.push_back(est.lambda1_hat);
    samples.push_back(s);
  }
  PipelineOutput out;
  out.result = {{"samples", samples}, {"lambda1_across_samples", aggregate(hats)}};
  return out;
}

PipelineOutput run_separate(const RunConfig& cfg) {
  const auto c = make_cocycle(cfg);
  const auto& e = cfg.estimator;
  SeparationOptions so;
  so.warmup = e.warmup;
  so.dt = e.dt;
  PipelineOutput out;
  json samples = json::array();
  std::vector<double> sigmas;
  for (int k = 0; k < e.samples; ++k) {
    const DriverState omega = omega_of(*c, cfg, k);
    const SeparationEstimate est = separation_estimate(*c, omega, e.horizon, so);
    json s = sample_header(cfg, k, e.horizon);
    s["lambda1_hat"] = number(est.lambda1_hat);
    s["lambda2_hat"] = number(est.lambda2_hat);
    s["sigma_hat"] = number(est.sigma_hat);
    s["sigma_infinite"] = est.sigma_infinite;
    s["w"] = vector(est.w);
    s["w_star"] = vector(est.w_star);
    s["f1_basis"] = matrix(est.f1_basis);
    s["temperedness_slope"] = number(est.temperedness_slope);
    s["max_invariance_residual"] = number(est.max_invariance_residual);
    if (cfg.output.series_csv) {
      const std::string name = "series_" + tag(cfg, k) + ".csv";
      out.artifacts.push_back({name, series_csv(est)});
      s["series_csv"] = name;
    }
    if (cfg.output.plot_csv) {
      FloquetOptions fo;
      fo.dt = e.dt;
      fo.record_history = true;
      const Vector u0 = random_start(c->cone(), c->dim(), cfg.seed, k);
      const FloquetTrack track = forward_floquet(*c, omega, u0, e.horizon, fo);
      const std::string name = "plot_" + tag(cfg, k) + ".csv";
      out.artifacts.push_back({name, plot_csv(est, track)});
      s["plot_csv"] = name;
    }
    if (std::isfinite(est.sigma_hat)) sigmas.push_back(est.sigma_hat);
    samples.push_back(s);
  }
  out.result = {{"samples", samples}, {"sigma_across_samples", aggregate(sigmas)}};
  return out;
}

PipelineOutput run_orbit(const RunConfig& cfg) {
  const auto c = make_cocycle(cfg);
  const auto m = cfg.estimator.orbit_depth;
  const Vector probe = c->cone().interior_unit(c->dim());
  json samples = json::array();
  for (int k = 0; k < cfg.estimator.samples; ++k) {
    const DriverState omega = omega_of(*c, cfg, k);
    const OrbitConvergence oc = orbit_convergence(*c, omega, m, probe);
    const auto orbit = backward_entire_orbit(*c, omega, m, probe);
    json pts = json::array();
    for (const auto& p : orbit) pts.push_back({{"n", p.n}, {"v", vector(p.v)}, {"log_scale", number(p.log_scale)}});
    json s = {{"seed", cfg.seed}, {"sample", k}, {"depth", m}};
    s["v_depth"] = vector(oc.v_m);
    s["v_double_depth"] = vector(oc.v_2m);
    s["distance"] = number(oc.distance);
    s["orbit"] = pts;
    samples.push_back(s);
  }
  PipelineOutput out;
  out.result = {{"samples", samples}};
  return out;
}

PipelineOutput run_oseledets(const RunConfig& cfg) {
  const auto c = make_cocycle(cfg);
  json samples = json::array();
  for (int k = 0; k < cfg.estimator.samples; ++k) {
    const auto ex = oseledets_qr(*c, omega_of(*c, cfg, k), cfg.estimator.horizon, cfg.estimator.dt);
    json s = sample_header(cfg, k, cfg.estimator.horizon);
    json a = json::array();
    for (double x : ex) a.push_back(number(x));
    s["exponents"] = a;
    s["gap"] = number(ex.size() >= 2 ? ex[0] - ex[1] : 0.0);
    samples.push_back(s);
  }
  PipelineOutput out;
  out.result = {{"samples", samples}};
  return out;
}

PipelineOutput run_example_torus(const RunConfig& cfg) {
  if (cfg.kind != ModelKind::TorusExample) throw ConfigError("model.kind: example-torus needs \"torus-example\"");
  TorusValidationOptions o;
  const auto& e = cfg.estimator;
  o.rho = cfg.rho;
  o.seed = cfg.seed;
  o.horizon = e.horizon;
  o.warmup = e.warmup;
  o.dt = e.dt;
  o.omega_samples = std::max(e.samples, 5);
  o.propagator_tol = e.propagator_tol;
  o.w_tol = e.w_tol;
  o.sigma_lo = e.sigma_lo;
  o.sigma_hi = e.sigma_hi;
  o.ladder_samples = e.ladder_samples;
  o.divergence_threshold = e.divergence_threshold;
  const TorusValidationReport r = validate_against_closed_form(o);
  json items = json::array();
  for (const auto& it : r.items) {
    items.push_back({{"id", it.id},
                     {"pass", it.pass},
                     {"value", number(it.value)},
                     {"tolerance", number(it.tolerance)},
                     {"detail", it.detail}});
  }
  json sig = json::array(), lam = json::array(), werr = json::array();
  for (double x : r.sigma_hats) sig.push_back(number(x));
  for (double x : r.lambda1_hats) lam.push_back(number(x));
  for (double x : r.w_errors) werr.push_back(number(x));
  PipelineOutput out;
  out.result = {{"rho", number(cfg.rho)},
                {"horizon", number(o.horizon)},
                {"seed", cfg.seed},
                {"items", items},
                {"all_pass", r.all_pass()},
                {"kappa_constant", number(r.kappa_constant)},
                {"sigma_hats", sig},
                {"lambda1_hats", lam},
                {"w_errors", werr},
                {"max_propagator_error", number(r.max_propagator_error)},
                {"ladder", ladder_json(r.ladder)}};
  return out;
}

PipelineOutput run_leslie_demo(const RunConfig& cfg) {
  if (cfg.kind != ModelKind::Leslie) throw ConfigError("model.kind: leslie-demo needs \"leslie\"");
  PipelineOutput out = run_estimate(cfg);
  const auto p = leslie_nstep_positive(*cfg.matrix, cfg.seed, cfg.estimator.check_samples);
  out.result["nstep_positivity"] = {{"steps", cfg.matrix->dim()},
                                    {"all_positive", p.all_positive},
                                    {"n_samples", p.n_samples},
                                    {"min_entry", number(p.min_entry)}};
  if (cfg.matrix->is_constant()) {
    // Perron root of the constant Leslie matrix as the oracle.
    const Matrix s = cfg.matrix->emit(cfg.matrix->driver().sample_initial(cfg.seed));
    const Eigen::EigenSolver<Matrix> es(s);
    double root = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) root = std::max(root, es.eigenvalues()[i].real());
    out.result["perron_oracle"] = {{"ln_perron_root", number(std::log(root))},
                                   {"abs_error", number(std::abs(out.result["samples"][0]["lambda1_hat"].get<double>() -
                                                                 std::log(root)))}};
  }
  return out;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [k, name] : kCommands) {
    if (k == c) return name;
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& [k, n] : kCommands) {
    if (name == n) return k;
  }
  return std::nullopt;
}

json default_config(Command c) {
  if (c == Command::LeslieDemo) {
    // Fibonacci-Leslie matrix [[1, 1], [1, 0]]: growth rate ln of the golden ratio.
    return json::parse(R"({
      "seed": 1,
      "model": {"kind": "leslie", "fertility": [1.0, 1.0], "survival": [1.0]},
      "estimator": {"horizon": 1000, "warmup": 50, "batches": 20}
    })");
  }
  return json::parse(R"({
    "seed": 1,
    "model": {"kind": "torus-example"},
    "estimator": {"horizon": 50, "warmup": 50, "dt": 0.1, "samples": 5}
  })");
}

RunConfig apply_overrides(RunConfig cfg, const Overrides& o) {
  const bool discrete = cfg.kind == ModelKind::Matrix || cfg.kind == ModelKind::Leslie;
  if (o.seed) cfg.seed = *o.seed;
  if (o.horizon) {
    if (!(*o.horizon > 0.0)) throw ConfigError("--horizon: must be > 0");
    if (discrete && std::floor(*o.horizon) != *o.horizon) throw ConfigError("--horizon: must be an integer for matrix models");
    cfg.estimator.horizon = *o.horizon;
  }
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt: must be > 0");
    cfg.estimator.dt = *o.dt;
  }
  if (o.samples) {
    if (*o.samples < 1) throw ConfigError("--samples: must be >= 1");
    cfg.estimator.samples = *o.samples;
  }
  if (o.rho) {
    if (cfg.kind != ModelKind::TorusExample) throw ConfigError("--rho: only for the torus-example model");
    if (!(*o.rho > 0.0 && *o.rho < 1.0)) throw ConfigError("--rho: must lie in (0, 1)");
    cfg.rho = *o.rho;
    cfg.ode = torus_example_model(cfg.rho);
  }
  if (o.propagator_tol) cfg.estimator.propagator_tol = *o.propagator_tol;
  if (o.direction_tol) cfg.estimator.w_tol = *o.direction_tol;
  if (o.sigma_low) cfg.estimator.sigma_lo = *o.sigma_low;
  if (o.sigma_high) cfg.estimator.sigma_hi = *o.sigma_high;
  if (!(cfg.estimator.sigma_lo < cfg.estimator.sigma_hi)) throw ConfigError("--sigma-low: must be below --sigma-high");
  if (o.out) cfg.output.dir = *o.out;
  return cfg;
}

PipelineOutput run_pipeline(Command c, const RunConfig& cfg) {
  PipelineOutput out;
  switch (c) {
    case Command::Check: out = run_check(cfg); break;
    case Command::Estimate: out = run_estimate(cfg); break;
    case Command::Separate: out = run_separate(cfg); break;
    case Command::Orbit: out = run_orbit(cfg); break;
    case Command::Oseledets: out = run_oseledets(cfg); break;
    case Command::ExampleTorus: out = run_example_torus(cfg); break;
    case Command::LeslieDemo: out = run_leslie_demo(cfg); break;
  }
  json doc = {{"tool", {{"name", "posdyn"}, {"version", POSDYN_VERSION}}},
              {"command", to_string(c)},
              {"seed", cfg.seed},
              {"model", {{"kind", to_string(cfg.kind)}}},
              {"config", cfg.echo},
              {"results", out.result}};
  if (cfg.matrix) {
    doc["model"]["dim"] = cfg.matrix->dim();
    doc["model"]["description"] = cfg.matrix->description();
    doc["model"]["driver"] = cfg.matrix->driver().describe();
  } else {
    doc["model"]["dim"] = cfg.ode->dim();
    doc["model"]["description"] = cfg.ode->description();
    doc["model"]["driver"] = cfg.ode->driver().describe();
  }
  doc["estimator"] = {{"horizon", number(cfg.estimator.horizon)},
                      {"dt", number(cfg.estimator.dt)},
                      {"warmup", number(cfg.estimator.warmup)},
                      {"batches", cfg.estimator.batches},
                      {"samples", cfg.estimator.samples}};
  out.result = std::move(doc);
  return out;
}

std::string output_dir(const RunConfig& cfg, const Overrides& o) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv("POSDYN_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.output.dir;
}

int run(Command c, const std::optional<std::string>& config_path, const Overrides& o, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  try {
    if (config_path) {
      cfg = load_config(*config_path);
    } else if (c == Command::LeslieDemo || c == Command::ExampleTorus) {
      cfg = parse_config(default_config(c));
    } else {
      throw ConfigError("--config: required for " + to_string(c));
    }
    cfg = apply_overrides(std::move(cfg), o);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  PipelineOutput out;
  try {
    out = run_pipeline(c, cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const PositivityViolation& e) {
    err << "assumption failure: " << e.what() << "\n";
    return kAssumptionFailure;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  const std::filesystem::path dir(output_dir(cfg, o));
  try {
    write_file((dir / "results.json").string(), dump(out.result));
    for (const auto& a : out.artifacts) write_file((dir / a.name).string(), a.text);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file((dir / "timing.json").string(), dump(json{{"command", to_string(c)}, {"wall_seconds", secs}}));
  } catch (const Error& e) {
    err << "output error: " << e.what() << "\n";
    return kConfigError;
  }
  if (out.exit_code == kAssumptionFailure) err << "assumption failure: a hard condition fails; see results.json\n";
  return out.exit_code;
}

}  // namespace posdyn::cli
