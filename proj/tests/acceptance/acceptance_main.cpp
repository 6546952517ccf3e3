// Acceptance suite: one PASS/FAIL line per criterion. Run without arguments
// for all criteria, or with criterion numbers to run a subset. Exit status is
// nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli/pipelines.hpp"
#include "oracles.hpp"
#include "posdyn/cooperative.hpp"
#include "posdyn/estimators.hpp"
#include "posdyn/integrator.hpp"
#include "posdyn/leslie.hpp"
#include "posdyn/matrix_cocycle.hpp"
#include "posdyn/order.hpp"
#include "posdyn/torus_example.hpp"
#include "zoo.hpp"

using namespace posdyn;

namespace {

// Pinned tolerances.
constexpr double kSigmaLo = 1.9;
constexpr double kSigmaHi = 2.1;
constexpr double kTorusRuntime = 10.0;          // seconds
constexpr double kTorusDirection = 1e-6;
constexpr double kDivergenceBar = -10.0;
constexpr double kClosedFormLogScale = 1e-8;
constexpr double kPerronLambda = 1e-6;
constexpr double kPerronVector = 1e-8;
constexpr double kCrossLambda = 1e-3;
constexpr double kCrossSigmaRel = 0.10;
constexpr double kKappaFloor = 1e-3;
constexpr double kKappaCiFactor = 3.0;
constexpr double kSandwichSlack = 1e-14;        // relative rounding slack
constexpr double kSplitMatrix = 1e-10;
constexpr double kSplitOde = 1e-8;
constexpr double kInvariance = 1e-6;
constexpr double kTemperedness = 1e-2;
constexpr double kPositivity = 1e-12;           // relative to |u|
constexpr double kOrbit = 1e-8;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector unit_diagonal() { return Vector::Constant(2, 1.0 / std::numbers::sqrt2); }

// Integral of -1/(x1 + x2)^2 along (x1 + t, x2 + rho t) mod 1, piece by piece.
// Coordinates live in (0, 1]; a coordinate at 1 moves on from 0.
double torus_a_integral_oracle(double x1, double x2, double t, double rho) {
  double total = 0.0;
  double left = t;
  while (left > 0.0) {
    if (x1 >= 1.0) x1 = 0.0;
    if (x2 >= 1.0) x2 = 0.0;
    const double d1 = 1.0 - x1;
    const double d2 = (1.0 - x2) / rho;
    const double h = std::min({d1, d2, left});
    const double c0 = x1 + x2;
    total += -h / (c0 * (c0 + (1.0 + rho) * h));
    x1 = (h == d1) ? 1.0 : x1 + h;
    x2 = (h == d2) ? 1.0 : x2 + rho * h;
    left -= h;
  }
  return total;
}

// ---------------------------------------------------------------------------

Outcome c1_torus_sigma() {
  const auto t0 = std::chrono::steady_clock::now();
  const OdeModel model = torus_example_model();
  const OdeCocycle c(model);
  SeparationOptions so;
  so.warmup = 50.0;
  so.dt = 0.1;
  Outcome out;
  double lo = 1e300, hi = -1e300;
  for (std::uint64_t k = 0; k < 5; ++k) {
    const DriverState omega = sample_point(model.driver(), 11, k);
    const SeparationEstimate est = separation_estimate(c, omega, 50.0, so);
    lo = std::min(lo, est.sigma_hat);
    hi = std::max(hi, est.sigma_hat);
    if (!(est.sigma_hat >= kSigmaLo && est.sigma_hat <= kSigmaHi)) out.pass = false;
  }
  const double secs = seconds_since(t0);
  if (secs >= kTorusRuntime) out.pass = false;
  out.detail = "sigma_hat in [" + fmt(lo) + ", " + fmt(hi) + "] over 5 omega, T=50, " + fmt(secs) + " s";
  return out;
}

Outcome c2_torus_direction() {
  const OdeModel model = torus_example_model();
  const OdeCocycle c(model);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    const DriverState omega = sample_point(model.driver(), 12, k);
    const Vector w = pullback_direction(c, omega, 50.0);
    worst = std::max(worst, (w - unit_diagonal()).norm());
  }
  return {worst <= kTorusDirection, "max |w - (1,1)/sqrt2| = " + fmt(worst) + " (tol " + fmt(kTorusDirection) + ")"};
}

Outcome c3_torus_divergence() {
  const OdeModel model = torus_example_model();
  const Vector w = unit_diagonal();
  const Observable kappa = [&](const DriverState& s) { return kappa_functional(model.field(s), w); };
  std::vector<DriverState> omegas;
  for (std::uint64_t k = 0; k < 100; ++k) omegas.push_back(sample_point(model.driver(), 13, k));
  const std::vector<double> horizons{125.0, 250.0, 500.0, 1000.0};
  const DivergenceLadder ladder = birkhoff_ladder(kappa, model.driver(), omegas, horizons, kDivergenceBar);
  std::string means;
  for (double m : ladder.means) means += (means.empty() ? "" : ", ") + fmt(m);
  return {ladder.diverging && ladder.strictly_decreasing && ladder.below_threshold,
          "kappa averages at T=125..1000: " + means + "; decreasing=" + (ladder.strictly_decreasing ? "yes" : "no") +
              ", below " + fmt(kDivergenceBar) + "=" + (ladder.below_threshold ? "yes" : "no")};
}

Outcome c4_closed_form() {
  const OdeModel model = torus_example_model();
  const double rho = model.driver().rho();
  double worst = 0.0, worst_dir = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const DriverState omega = sample_point(model.driver(), 14, k);
    const auto& x = std::get<TorusState>(omega);
    for (double t : {0.25, 0.5, 1.0, 2.0, 3.7, 5.0, 7.5, 10.0}) {
      const ScaledMatrix gen = propagator(model, omega, t);
      // U(t) = exp(int a) [[cosh t, sinh t], [sinh t, cosh t]], operator norm exp(int a + t).
      const double ls = torus_a_integral_oracle(x.x1, x.x2, t, rho) + t;
      Matrix dir(2, 2);
      const double e = std::exp(-2.0 * t);
      dir << 0.5 * (1.0 + e), 0.5 * (1.0 - e), 0.5 * (1.0 - e), 0.5 * (1.0 + e);
      worst = std::max(worst, std::abs(gen.log_scale - ls) / std::max(1.0, std::abs(ls)));
      worst_dir = std::max(worst_dir, (gen.direction - dir).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= kClosedFormLogScale,
          "max relative log-scale error " + fmt(worst) + " (tol " + fmt(kClosedFormLogScale) +
              "), max direction error " + fmt(worst_dir) + ", 20 omega, t <= 10"};
}

Outcome c5_perron() {
  std::mt19937_64 rng(505);
  const Matrix s3 = oracle::random_positive(rng, 3);
  const Matrix s2 = zoo::mat({{2.0, 1.0}, {0.5, 3.0}});
  Vector fert(2), surv(1);
  fert << 1.0, 1.0;
  surv << 1.0;
  const Matrix fib = leslie_matrix(fert, surv);
  struct Case {
    std::string name;
    Matrix s;
    oracle::Perron p;
  };
  const std::vector<Case> cases{{"2x2", s2, oracle::perron_2x2(s2)},
                                {"3x3", s3, oracle::perron_eigen(s3)},
                                {"fibonacci", fib, oracle::fibonacci()}};
  Outcome out;
  Lambda1Options lo;
  lo.horizon = 1000.0;
  for (const auto& cs : cases) {
    const MatrixCocycle c(MatrixModel::constant(cs.s));
    const DriverState omega = c.driver().sample_initial(5);
    const Lambda1Estimate est = estimate_lambda1(c, omega, lo);
    const double dl = std::abs(est.lambda1_hat - std::log(cs.p.root));
    const double dw = (est.track.w - cs.p.vector).norm();
    if (!(dl <= kPerronLambda && dw <= kPerronVector)) out.pass = false;
    out.detail += cs.name + ": |dlambda|=" + fmt(dl) + " |dw|=" + fmt(dw) + "; ";
  }
  return out;
}

MatrixModel random_iid_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lo(0.05, 1.0), width(0.1, 2.0);
  Matrix low(3, 3), high(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      low(i, j) = lo(rng);
      high(i, j) = low(i, j) + width(rng);
    }
  }
  return MatrixModel::iid_uniform_entries(low, high);
}

Outcome c6_cross_method() {
  std::mt19937_64 rng(606);
  Outcome out;
  double worst_l = 0.0, worst_s = 0.0;
  for (int k = 0; k < 10; ++k) {
    const MatrixCocycle c(random_iid_model(rng));
    const DriverState omega = sample_point(c.driver(), 6, static_cast<std::uint64_t>(k));
    const double T = 1e4;
    const FloquetTrack f = forward_floquet(c, omega, Cone::standard().interior_unit(3), T);
    const std::vector<double> qr = oseledets_qr(c, omega, T);
    const SeparationEstimate sep = separation_estimate(c, omega, T);
    const double dl = std::abs(f.lambda1_hat() - qr[0]);
    const double gap = qr[0] - qr[1];
    const double ds = std::abs(sep.sigma_hat - gap) / gap;
    worst_l = std::max(worst_l, dl);
    worst_s = std::max(worst_s, ds);
  }
  out.pass = worst_l <= kCrossLambda && worst_s <= kCrossSigmaRel;
  out.detail = "10 models, T=1e4: max |floquet - qr| = " + fmt(worst_l) + ", max sigma relative gap error = " +
               fmt(worst_s);
  return out;
}

Outcome c7_kappa_route() {
  std::vector<zoo::NamedOdeModel> models;
  for (auto& m : zoo::ode_models()) {
    if (m.name != "torus-example") models.push_back(m);
  }
  models.push_back({"torus-trig-3", OdeModel::torus_trig(zoo::mat({{-0.8, 0.4, 0.3}, {0.5, -0.2, 0.2}, {0.3, 0.6, -1.1}}),
                                                         zoo::mat({{0.3, 0.1, 0.1}, {0.2, 0.4, 0.0}, {0.1, 0.2, 0.2}}),
                                                         zoo::mat({{0.1, 0.2, 0.1}, {0.1, 0.0, 0.1}, {0.2, 0.1, 0.3}}))});
  Outcome out;
  double worst_ratio = 0.0;
  for (const auto& m : models) {
    const OdeCocycle c(m.model);
    const DriverState omega = sample_point(m.model.driver(), 7, 0);
    Lambda1Options lo;
    lo.horizon = 500.0;
    const Lambda1Estimate fl = estimate_lambda1(c, omega, lo);
    KappaOptions ko;
    const KappaEstimate ka = lambda1_via_kappa(m.model, omega, 500.0, ko);
    const double diff = std::abs(ka.lambda1 - fl.lambda1_hat);
    const double tol = std::max(kKappaFloor, kKappaCiFactor * std::max(ka.ci.half_width, fl.ci.half_width));
    worst_ratio = std::max(worst_ratio, diff / tol);
    if (!(diff <= tol)) out.pass = false;
    out.detail += m.name + " " + fmt(diff) + "; ";
  }
  out.detail = "5 models, |kappa - floquet|: " + out.detail + "worst diff/tol " + fmt(worst_ratio);
  return out;
}

Outcome c8_sandwich() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> dim(2, 6);
  std::lognormal_distribution<double> entry(0.0, 1.0);
  std::uniform_real_distribution<double> comp(0.0, 1.0);
  long violations = 0;
  long checks = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = dim(rng);
    Matrix s(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s(i, j) = entry(rng);
    }
    const FocusingCertificate fc = focusing_certificate(s);
    for (int r = 0; r < 100; ++r) {
      Vector u(n);
      for (int i = 0; i < n; ++i) u[i] = comp(rng);
      const Vector su = s * u;
      const Vector lower = fc.beta(u) * fc.e;
      const Vector upper = fc.kappa * fc.beta(u) * fc.e;
      for (int i = 0; i < n; ++i) {
        ++checks;
        const double slack = kSandwichSlack * su[i];
        if (su[i] < lower[i] - slack || su[i] > upper[i] + slack) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) +
                               " componentwise checks (1000 matrices x 100 u)"};
}

Outcome c9_leslie() {
  Outcome out;
  for (int n : {2, 3, 5}) {
    std::vector<ParamDistribution> f, s;
    for (int i = 0; i < n; ++i) f.push_back(ParamDistribution::uniform(0.1, 1.5));
    for (int i = 0; i + 1 < n; ++i) s.push_back(ParamDistribution::uniform(0.3, 0.95));
    const MatrixModel model = leslie_model(f, s);
    const NStepPositivity rep = leslie_nstep_positive(model, 909, 100);
    // Independent recount through the raw product.
    int fails = 0;
    double min_entry = 1e300;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Matrix p = lag_product(model, sample_point(model.driver(), 99, k), n);
      min_entry = std::min(min_entry, p.minCoeff());
      if (!(p.minCoeff() > 0.0)) ++fails;
    }
    if (!rep.all_positive || fails != 0) out.pass = false;
    out.detail += "N=" + std::to_string(n) + ": " + std::to_string(rep.failures + fails) + " failures, min entry " +
                  fmt(std::min(min_entry, rep.min_entry)) + "; ";
  }
  return out;
}

Outcome c10_invariance() {
  Outcome out;
  double split_m = 0.0, split_o = 0.0, inv = 0.0, temper = 0.0, pos = 0.0;
  bool conj_exact = true;

  for (const auto& m : zoo::matrix_models()) {
    const MatrixCocycle c(m.model);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const DriverState omega = sample_point(m.model.driver(), 10, k);
      const ScaledMatrix whole = cocycle_product(m.model, omega, 12);
      const ScaledMatrix first = cocycle_product(m.model, omega, 7);
      const ScaledMatrix second = cocycle_product(m.model, m.model.driver().advance(omega, 7), 5);
      split_m = std::max(split_m, oracle::scaled_distance(second.direction * first.direction,
                                                          first.log_scale + second.log_scale, whole.direction,
                                                          whole.log_scale));
    }
    const SeparationEstimate sep = separation_estimate(c, sample_point(m.model.driver(), 10, 99), 400.0);
    inv = std::max(inv, sep.max_invariance_residual);
    temper = std::max(temper, std::abs(sep.temperedness_slope));
  }

  std::vector<zoo::NamedOdeModel> odes = zoo::ode_models();
  odes.push_back({"type-k", zoo::typek_model()});
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> comp(0.0, 1.0);
  for (const auto& m : odes) {
    const OdeCocycle c(m.model);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const DriverState omega = sample_point(m.model.driver(), 10, k);
      const ScaledMatrix whole = propagator(m.model, omega, 3.4);
      const ScaledMatrix first = propagator(m.model, omega, 1.3);
      const ScaledMatrix second = propagator(m.model, m.model.driver().advance(omega, 1.3), 2.1);
      split_o = std::max(split_o, oracle::scaled_distance(second.direction * first.direction,
                                                          first.log_scale + second.log_scale, whole.direction,
                                                          whole.log_scale));
      Vector u0(m.model.dim());
      for (Eigen::Index i = 0; i < u0.size(); ++i) u0[i] = comp(rng) * m.model.cone().sign(static_cast<int>(i));
      const ScaledVector u = integrate(m.model, omega, u0, 5.0);
      // Worst coordinate on the wrong side of the cone, relative to |u|.
      for (Eigen::Index i = 0; i < u.direction.size(); ++i) {
        pos = std::max(pos, -m.model.cone().sign(static_cast<int>(i)) * u.direction[i]);
      }
    }
    const SeparationEstimate sep = separation_estimate(c, sample_point(m.model.driver(), 10, 99), 50.0);
    inv = std::max(inv, sep.max_invariance_residual);
    temper = std::max(temper, std::abs(sep.temperedness_slope));
  }

  // Type-K conjugacy: v = D u solves the cooperative system exactly.
  const OdeModel b = zoo::typek_model();
  const OdeModel a = typek_to_cooperative(b, 2, 1);
  const Vector d = Cone::type_k(2, 1).sign_vector(3);
  for (std::uint64_t k = 0; k < 5; ++k) {
    const DriverState omega = sample_point(b.driver(), 10, k);
    Vector u0(3);
    u0 << comp(rng), comp(rng), -comp(rng);
    const ScaledVector ub = integrate(b, omega, u0, 4.0);
    const ScaledVector ua = integrate(a, omega, d.cwiseProduct(u0), 4.0);
    if (!(d.cwiseProduct(ub.direction) == ua.direction) || ub.log_scale != ua.log_scale) conj_exact = false;
  }

  out.pass = split_m <= kSplitMatrix && split_o <= kSplitOde && inv <= kInvariance && pos <= kPositivity &&
             conj_exact && temper <= kTemperedness;
  out.detail = "split matrix " + fmt(split_m) + ", split ode " + fmt(split_o) + ", invariance " + fmt(inv) +
               ", cone defect " + fmt(pos) + ", type-K conjugacy " + (conj_exact ? "exact" : "inexact") +
               ", temperedness slope " + fmt(temper);
  return out;
}

Outcome c11_orbits() {
  std::vector<MatrixModel> models;
  models.push_back(zoo::matrix_models()[0].model);
  models.push_back(zoo::matrix_models()[1].model);
  std::mt19937_64 rng(1111);
  for (int k = 0; k < 3; ++k) models.push_back(random_iid_model(rng));
  double worst = 0.0;
  for (const auto& m : models) {
    const MatrixCocycle c(m);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const DriverState omega = sample_point(m.driver(), 111, k);
      const OrbitConvergence oc = orbit_convergence(c, omega, 20, Cone::standard().interior_unit(m.dim()));
      worst = std::max(worst, oc.distance);
    }
  }
  return {worst <= kOrbit, "max |v_20 - v_40| = " + fmt(worst) + " over 5 models x 10 omega"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome c12_determinism() {
  namespace fs = std::filesystem;
  using namespace posdyn::cli;
  const fs::path base = fs::temp_directory_path() / ("posdyn-acceptance-" + std::to_string(::getpid()));
  const std::vector<std::pair<Command, std::string>> runs{
      {Command::Estimate, "matrix_iid_uniform.json"},
      {Command::Separate, "ode_piecewise.json"},
      {Command::ExampleTorus, "torus_example.json"},
  };
  Outcome out;
  std::ostringstream sink;
  for (const auto& [cmd, cfg] : runs) {
    const std::string path = std::string(POSDYN_SOURCE_DIR) + "/configs/" + cfg;
    std::string bytes[2];
    for (int r = 0; r < 2; ++r) {
      Overrides o;
      o.out = (base / (to_string(cmd) + std::to_string(r))).string();
      const int code = run(cmd, path, o, sink);
      if (code != kOk && code != kAssumptionFailure) out.pass = false;
      bytes[r] = slurp(fs::path(*o.out) / "results.json");
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    if (!same) out.pass = false;
    out.detail += to_string(cmd) + (same ? " identical" : " DIFFERENT") + " (" + std::to_string(bytes[0].size()) +
                  " bytes); ";
  }
  fs::remove_all(base);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"torus separation rate sigma in [1.9, 2.1], T=50, < 10 s", c1_torus_sigma},
      {"torus principal direction within 1e-6 of (1,1)/sqrt2", c2_torus_direction},
      {"torus kappa averages strictly decreasing and below -10", c3_torus_divergence},
      {"closed form vs generic integrator, log-scale error <= 1e-8", c4_closed_form},
      {"Perron oracle on constant models", c5_perron},
      {"Floquet vs QR exponents and separation gap", c6_cross_method},
      {"kappa route vs Floquet on cooperative ODEs", c7_kappa_route},
      {"focusing sandwich, zero violations", c8_sandwich},
      {"Leslie N-step positivity", c9_leslie},
      {"invariance suite on the model zoo", c10_invariance},
      {"backward entire orbit, depth 20 vs 40", c11_orbits},
      {"byte-identical results.json on repeated runs", c12_determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: unknown\n", id);
      ++failures;
      continue;
    }
    const auto& [name, fn] = criteria[static_cast<std::size_t>(id - 1)];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%-4s criterion %2d: %s | %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
