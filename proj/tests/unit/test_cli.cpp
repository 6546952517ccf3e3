#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/pipelines.hpp"
#include "doctest.h"

using namespace posdyn;
using namespace posdyn::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("posdyn-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

json matrix_doc() {
  return json::parse(R"({
    "seed": 3,
    "driver": {"kind": "iid"},
    "model": {"kind": "matrix", "form": "constant", "matrix": [[2, 1], [1, 3]]},
    "estimator": {"horizon": 200}
  })");
}

}  // namespace

TEST_CASE("config errors name the offending key") {
  CHECK(config_error(matrix_doc()).empty());

  json d = matrix_doc();
  d["model"].erase("form");
  CHECK(config_error(d).find("model.form") != std::string::npos);

  d = matrix_doc();
  d["estimator"]["horizn"] = 5;
  CHECK(config_error(d).find("estimator.horizn") != std::string::npos);

  d = matrix_doc();
  d["estimator"]["horizon"] = "long";
  CHECK(config_error(d).find("estimator.horizon") != std::string::npos);

  d = matrix_doc();
  d["model"]["matrix"] = json::parse("[[1, 2], [3]]");
  CHECK(config_error(d).find("model.matrix") != std::string::npos);

  d = matrix_doc();
  d["driver"]["kind"] = "torus";
  CHECK_FALSE(config_error(d).empty());
}

TEST_CASE("malformed config file exits 1 and names the key") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "bad.json";
  json d = matrix_doc();
  d["model"]["kind"] = "tensor";
  std::ofstream(cfg) << d.dump();
  std::ostringstream err;
  Overrides o;
  o.out = (tmp.path / "out").string();
  CHECK(run(Command::Estimate, cfg.string(), o, err) == kConfigError);
  CHECK(err.str().find("model.kind") != std::string::npos);

  std::ofstream(tmp.path / "broken.json") << "{ \"seed\": ";
  std::ostringstream err2;
  CHECK(run(Command::Estimate, (tmp.path / "broken.json").string(), o, err2) == kConfigError);
  CHECK(run(Command::Estimate, (tmp.path / "missing.json").string(), o, err2) == kConfigError);
}

TEST_CASE("assumption failures exit 2") {
  TempDir tmp;
  json d = matrix_doc();
  d["model"]["matrix"] = json::parse("[[1, -1], [1, 1]]");
  std::ofstream(tmp.path / "neg.json") << d.dump();
  Overrides o;
  o.out = (tmp.path / "out").string();
  std::ostringstream err;
  CHECK(run(Command::Check, (tmp.path / "neg.json").string(), o, err) == kAssumptionFailure);
  CHECK(run(Command::Estimate, (tmp.path / "neg.json").string(), o, err) == kAssumptionFailure);
}

TEST_CASE("leslie demo recovers ln phi") {
  const RunConfig cfg = parse_config(default_config(Command::LeslieDemo));
  const PipelineOutput out = run_pipeline(Command::LeslieDemo, cfg);
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const double hat = out.result["results"]["samples"][0]["lambda1_hat"].get<double>();
  CHECK(hat == doctest::Approx(std::log(phi)).epsilon(1e-12));
  CHECK(out.exit_code == kOk);
}

TEST_CASE("torus example config reports sigma near 2") {
  Overrides o;
  o.samples = 2;
  const RunConfig cfg = apply_overrides(parse_config(default_config(Command::ExampleTorus)), o);
  const PipelineOutput out = run_pipeline(Command::ExampleTorus, cfg);
  for (const auto& s : out.result["results"]["sigma_hats"]) CHECK(s.get<double>() == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("every sample carries its seed and horizon") {
  RunConfig cfg = parse_config(matrix_doc());
  cfg.estimator.samples = 3;
  const PipelineOutput out = run_pipeline(Command::Estimate, cfg);
  REQUIRE(out.result["results"]["samples"].size() == 3);
  for (const auto& s : out.result["results"]["samples"]) {
    CHECK(s["seed"].get<int>() == 3);
    CHECK(s["horizon"].get<double>() == 200.0);
  }
  CHECK(out.result["seed"].get<int>() == 3);
}

TEST_CASE("output directory precedence") {
  RunConfig cfg = parse_config(matrix_doc());
  cfg.output.dir = "from-config";
  Overrides o;
  ::unsetenv("POSDYN_OUT_DIR");
  CHECK(output_dir(cfg, o) == "from-config");
  ::setenv("POSDYN_OUT_DIR", "from-env", 1);
  CHECK(output_dir(cfg, o) == "from-env");
  o.out = "from-flag";
  CHECK(output_dir(cfg, o) == "from-flag");
  ::unsetenv("POSDYN_OUT_DIR");
}

TEST_CASE("float formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2.0");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(NAN) == "nan");
  CHECK(dump(json{{"x", 1.5}}) == "{\n  \"x\": 1.5\n}\n");
  CHECK(number(INFINITY) == json("inf"));
}

TEST_CASE("series and plot files") {
  TempDir tmp;
  json d = json::parse(R"({
    "seed": 7,
    "driver": {"kind": "iid", "time": "continuous"},
    "model": {"kind": "ode", "form": "constant", "matrix": [[-1, 0.5], [0.3, -0.2]]},
    "estimator": {"horizon": 5, "samples": 2, "warmup": 5}
  })");
  std::ofstream(tmp.path / "ode.json") << d.dump();
  Overrides o;
  o.out = (tmp.path / "out").string();
  std::ostringstream err;
  REQUIRE(run(Command::Separate, (tmp.path / "ode.json").string(), o, err) == kOk);
  const fs::path out = tmp.path / "out";
  const std::string s0 = slurp(out / "series_seed7_sample0.csv");
  const std::string s1 = slurp(out / "series_seed7_sample1.csv");
  CHECK(s0.substr(0, s0.find('\n')) == "t,ln_rho,w_1,w_2,ln_proj_norm");
  CHECK(s0.substr(0, s0.find('\n')) == s1.substr(0, s1.find('\n')));
  const std::string p0 = slurp(out / "plot_seed7_sample0.csv");
  CHECK(p0.substr(0, p0.find('\n')) == "series,t,value");
  CHECK(p0.find("ln_direction_distance") != std::string::npos);
  CHECK(fs::exists(out / "timing.json"));

  CHECK_THROWS_AS(plot_csv(SeparationEstimate{}, FloquetTrack{}), PreconditionError);
  CHECK_THROWS_AS(series_csv(SeparationEstimate{}), PreconditionError);
}

TEST_CASE("repeated runs give byte-identical results") {
  TempDir tmp;
  std::ofstream(tmp.path / "m.json") << matrix_doc().dump();
  std::ostringstream err;
  std::string first;
  for (int r = 0; r < 2; ++r) {
    Overrides o;
    o.out = (tmp.path / ("run" + std::to_string(r))).string();
    REQUIRE(run(Command::Separate, (tmp.path / "m.json").string(), o, err) == kOk);
    const std::string bytes = slurp(fs::path(*o.out) / "results.json");
    if (r == 0) first = bytes;
    else CHECK(bytes == first);
  }
  CHECK(first.find("wall_seconds") == std::string::npos);
}
