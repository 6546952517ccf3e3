#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace posdyn::cli {
namespace {

// A JSON node together with its dotted path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) throw ConfigError(join(key) + ": missing required key");
    return {j_.at(key), join(key)};
  }

  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  void allow_only(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail("expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.contains(k)) throw ConfigError(join(k) + ": unknown key");
    }
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0");
    return v;
  }
  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }
  int count() const {
    const auto v = integer();
    if (v < 1 || v > 1000000) fail("must be an integer in [1, 1000000]");
    return static_cast<int>(v);
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  Matrix matrix() const {
    const std::size_t rows = size();
    if (rows == 0) fail("empty matrix");
    const std::size_t cols = at(0).size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      const Node row = at(i);
      if (row.size() != cols) row.fail("ragged matrix row");
      for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row.at(c).number();
    }
    return m;
  }

  std::vector<Matrix> matrices() const {
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).matrix());
    if (out.empty()) fail("need at least one matrix");
    return out;
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& j_;
  std::string path_;
};

struct DriverSpec {
  std::string kind = "iid";
  bool continuous = false;
  bool explicit_time = false;
  Matrix transition;
  double rho = kDefaultRho;
  bool present = false;
};

DriverSpec parse_driver(const Node& root) {
  DriverSpec d;
  if (!root.has("driver")) return d;
  const Node n = root.at("driver");
  n.allow_only({"kind", "time", "transition", "rho"});
  d.present = true;
  d.kind = n.at("kind").string();
  if (d.kind != "iid" && d.kind != "markov" && d.kind != "torus") {
    n.at("kind").fail("expected \"iid\", \"markov\" or \"torus\"");
  }
  if (n.has("time")) {
    const std::string t = n.at("time").string();
    if (t != "discrete" && t != "continuous") n.at("time").fail("expected \"discrete\" or \"continuous\"");
    d.continuous = t == "continuous";
    d.explicit_time = true;
  }
  if (d.kind == "torus") {
    if (d.explicit_time && !d.continuous) n.at("time").fail("the torus rotation is a continuous-time driver");
    d.continuous = true;
    if (n.has("rho")) d.rho = n.at("rho").number();
    if (!(d.rho > 0.0 && d.rho < 1.0)) n.at("rho").fail("must lie in (0, 1)");
  } else if (n.has("rho")) {
    n.at("rho").fail("only meaningful for the torus driver");
  }
  if (d.kind == "markov") {
    d.transition = n.at("transition").matrix();
  } else if (n.has("transition")) {
    n.at("transition").fail("only meaningful for the markov driver");
  }
  return d;
}

ParamDistribution parse_param(const Node& n) {
  if (n.raw().is_number()) return ParamDistribution::constant(n.number());
  n.allow_only({"dist", "value", "low", "high", "mu", "sigma"});
  const std::string dist = n.at("dist").string();
  if (dist == "constant") return ParamDistribution::constant(n.at("value").number());
  if (dist == "uniform") return ParamDistribution::uniform(n.at("low").number(), n.at("high").number());
  if (dist == "lognormal") return ParamDistribution::lognormal(n.at("mu").number(), n.at("sigma").positive());
  n.at("dist").fail("expected \"constant\", \"uniform\" or \"lognormal\"");
}

Cone parse_cone(const Node& model, int dim) {
  if (!model.has("cone")) return Cone::standard();
  const Node c = model.at("cone");
  c.allow_only({"kind", "k", "l"});
  const std::string kind = c.at("kind").string();
  if (kind == "standard") return Cone::standard();
  if (kind != "type_k") c.at("kind").fail("expected \"standard\" or \"type_k\"");
  const auto k = c.at("k").integer();
  const auto l = c.at("l").integer();
  if (k < 1 || l < 1 || k + l != dim) c.fail("type_k needs k, l >= 1 with k + l = N");
  return Cone::type_k(static_cast<int>(k), static_cast<int>(l));
}

// Library preconditions raised while building a model are configuration errors.
template <typename F>
auto build(const Node& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    where.fail(e.what());
  }
}

void parse_model(const Node& root, const DriverSpec& drv, RunConfig& cfg) {
  const Node m = root.at("model");
  const std::string kind = m.at("kind").string();
  if (kind == "matrix") {
    cfg.kind = ModelKind::Matrix;
    m.allow_only({"kind", "form", "matrix", "matrices", "weights", "low", "high"});
    if (drv.continuous) root.at("driver").fail("matrix models need a discrete-time driver");
    if (drv.kind == "torus") root.at("driver").at("kind").fail("matrix models need a shift driver");
    const std::string form = m.at("form").string();
    if (form == "constant") {
      cfg.matrix = build(m, [&] { return MatrixModel::constant(m.at("matrix").matrix()); });
    } else if (form == "list") {
      auto mats = m.at("matrices").matrices();
      if (drv.kind == "markov") {
        if (m.has("weights")) m.at("weights").fail("weights are set by the markov chain; remove this key");
        cfg.matrix = build(m, [&] { return MatrixModel::markov_list(drv.transition, mats); });
      } else {
        std::vector<double> w = m.has("weights") ? m.at("weights").numbers() : std::vector<double>(mats.size(), 1.0);
        cfg.matrix = build(m, [&] { return MatrixModel::iid_list(mats, w); });
      }
    } else if (form == "uniform_entries") {
      if (drv.kind == "markov") root.at("driver").at("kind").fail("uniform_entries draws i.i.d.; use \"iid\"");
      cfg.matrix = build(m, [&] { return MatrixModel::iid_uniform_entries(m.at("low").matrix(), m.at("high").matrix()); });
    } else {
      m.at("form").fail("expected \"constant\", \"list\" or \"uniform_entries\"");
    }
  } else if (kind == "leslie") {
    cfg.kind = ModelKind::Leslie;
    m.allow_only({"kind", "fertility", "survival"});
    if (drv.continuous) root.at("driver").fail("Leslie models need a discrete-time driver");
    if (drv.present && drv.kind != "iid") root.at("driver").at("kind").fail("Leslie models draw i.i.d.; use \"iid\"");
    const Node f = m.at("fertility");
    const Node s = m.at("survival");
    std::vector<ParamDistribution> fert, surv;
    for (std::size_t i = 0; i < f.size(); ++i) fert.push_back(parse_param(f.at(i)));
    for (std::size_t i = 0; i < s.size(); ++i) surv.push_back(parse_param(s.at(i)));
    cfg.matrix = build(m, [&] { return leslie_model(fert, surv); });
  } else if (kind == "ode") {
    cfg.kind = ModelKind::Ode;
    m.allow_only({"kind", "form", "matrix", "matrices", "weights", "base", "amp1", "amp2", "cone"});
    const std::string form = m.at("form").string();
    std::optional<OdeModel> om;
    if (form == "constant") {
      om = build(m, [&] { return OdeModel::constant(m.at("matrix").matrix()); });
    } else if (form == "piecewise") {
      if (!drv.present || !drv.continuous || drv.kind == "torus") {
        m.fail("piecewise ODE models need an iid or markov driver with \"time\": \"continuous\"");
      }
      auto mats = m.at("matrices").matrices();
      if (drv.kind == "markov") {
        if (m.has("weights")) m.at("weights").fail("weights are set by the markov chain; remove this key");
        om = build(m, [&] { return OdeModel::markov_piecewise(drv.transition, mats); });
      } else {
        std::vector<double> w = m.has("weights") ? m.at("weights").numbers() : std::vector<double>(mats.size(), 1.0);
        om = build(m, [&] { return OdeModel::iid_piecewise(mats, w); });
      }
    } else if (form == "torus_trig") {
      if (drv.present && drv.kind != "torus") root.at("driver").at("kind").fail("torus_trig needs the torus driver");
      om = build(m, [&] {
        return OdeModel::torus_trig(m.at("base").matrix(), m.at("amp1").matrix(), m.at("amp2").matrix(), drv.rho);
      });
    } else {
      m.at("form").fail("expected \"constant\", \"piecewise\" or \"torus_trig\"");
    }
    if (m.has("cone")) {
      const Cone c = parse_cone(m, om->dim());
      om = om->with_cone(c, om->description());
    }
    cfg.ode = std::move(om);
  } else if (kind == "torus-example") {
    cfg.kind = ModelKind::TorusExample;
    m.allow_only({"kind", "rho"});
    if (drv.present && drv.kind != "torus") root.at("driver").at("kind").fail("torus-example needs the torus driver");
    cfg.rho = m.has("rho") ? m.at("rho").number() : drv.rho;
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) m.at("rho").fail("must lie in (0, 1)");
    cfg.ode = torus_example_model(cfg.rho);
  } else {
    m.at("kind").fail("expected \"matrix\", \"ode\", \"leslie\" or \"torus-example\"");
  }
}

void parse_estimator(const Node& root, RunConfig& cfg) {
  if (!root.has("estimator")) return;
  const Node e = root.at("estimator");
  e.allow_only({"horizon", "dt", "warmup", "batches", "samples", "divergence_threshold", "orbit_depth", "kappa",
                "check_samples", "tolerances"});
  auto& est = cfg.estimator;
  if (e.has("horizon")) est.horizon = e.at("horizon").positive();
  if (e.has("dt")) est.dt = e.at("dt").positive();
  if (e.has("warmup")) {
    est.warmup = e.at("warmup").number();
    if (est.warmup < 0.0) e.at("warmup").fail("must be >= 0");
  }
  if (e.has("batches")) est.batches = e.at("batches").count();
  if (est.batches < 2) e.at("batches").fail("need at least 2 batches");
  if (e.has("samples")) est.samples = e.at("samples").count();
  if (e.has("divergence_threshold")) est.divergence_threshold = e.at("divergence_threshold").number();
  if (e.has("orbit_depth")) est.orbit_depth = e.at("orbit_depth").count();
  if (e.has("kappa")) est.kappa = e.at("kappa").boolean();
  if (e.has("check_samples")) est.check_samples = e.at("check_samples").count();
  if (e.has("tolerances")) {
    const Node t = e.at("tolerances");
    t.allow_only({"propagator", "direction", "sigma_low", "sigma_high", "ladder_samples"});
    if (t.has("propagator")) est.propagator_tol = t.at("propagator").positive();
    if (t.has("direction")) est.w_tol = t.at("direction").positive();
    if (t.has("sigma_low")) est.sigma_lo = t.at("sigma_low").number();
    if (t.has("sigma_high")) est.sigma_hi = t.at("sigma_high").number();
    if (t.has("ladder_samples")) est.ladder_samples = t.at("ladder_samples").count();
    if (!(est.sigma_lo < est.sigma_hi)) t.fail("sigma_low must be below sigma_high");
  }
  const bool discrete = cfg.kind == ModelKind::Matrix || cfg.kind == ModelKind::Leslie;
  if (discrete && std::floor(est.horizon) != est.horizon) e.at("horizon").fail("must be an integer for matrix models");
  if (discrete && std::floor(est.warmup) != est.warmup) e.at("warmup").fail("must be an integer for matrix models");
}

void parse_output(const Node& root, RunConfig& cfg) {
  if (!root.has("output")) return;
  const Node o = root.at("output");
  o.allow_only({"dir", "series_csv", "plot_csv"});
  if (o.has("dir")) cfg.output.dir = o.at("dir").string();
  if (o.has("series_csv")) cfg.output.series_csv = o.at("series_csv").boolean();
  if (o.has("plot_csv")) cfg.output.plot_csv = o.at("plot_csv").boolean();
}

}  // namespace

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Matrix: return "matrix";
    case ModelKind::Ode: return "ode";
    case ModelKind::Leslie: return "leslie";
    case ModelKind::TorusExample: return "torus-example";
  }
  return "?";
}

RunConfig parse_config(const json& doc) {
  const Node root(doc, "");
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  root.allow_only({"seed", "driver", "model", "estimator", "output"});
  RunConfig cfg;
  if (root.has("seed")) {
    const auto s = root.at("seed").integer();
    if (s < 0) root.at("seed").fail("must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  const DriverSpec drv = parse_driver(root);
  parse_model(root, drv, cfg);
  parse_estimator(root, cfg);
  parse_output(root, cfg);
  cfg.echo = doc;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

std::unique_ptr<Cocycle> make_cocycle(const RunConfig& cfg) {
  if (cfg.matrix) return std::make_unique<MatrixCocycle>(*cfg.matrix);
  IntegratorOptions io;
  return std::make_unique<OdeCocycle>(*cfg.ode, false, io);
}

}  // namespace posdyn::cli
