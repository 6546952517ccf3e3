#include "posdyn/cooperative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quadrature.hpp"

namespace posdyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluates A(theta_t omega) for t inside the smooth piece [a, b], keeping
// away from the endpoints so that one-sided limits are used.
struct PieceField {
  const OdeModel& model;
  const DriverState& omega;
  double a;
  double b;
  Matrix operator()(double t) const {
    const double eps = std::min(1e-12 * std::max(1.0, std::abs(b)), (b - a) / 4.0);
    return model.field(model.driver().advance(omega, std::clamp(t, a + eps, b - eps)));
  }
};

std::vector<double> piece_bounds(const OdeModel& model, const DriverState& omega, double t0, double t1) {
  std::vector<double> out{t0};
  for (double b : model.breakpoints(omega, t0, t1)) {
    if (b > out.back() && b < t1) out.push_back(b);
  }
  out.push_back(t1);
  return out;
}

double row_max_sum(const Matrix& a) { return a.rowwise().maxCoeff().sum(); }

// Running integrals of A on [0, 1] at subinterval endpoints, by 3-point
// Gauss-Legendre on each subinterval, plus the entrywise minimum of A over
// all evaluation points and the integral of sum_l max_j a_lj.
struct GridPass {
  std::vector<Matrix> running;  // running[k] = int_0^{t_k} A
  Matrix entry_min;
  double row_max_integral = 0.0;
};

GridPass grid_pass(const OdeModel& model, const DriverState& omega, int per_unit) {
  static const double gl_x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gl_w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const int n = model.dim();
  GridPass out;
  out.entry_min = Matrix::Constant(n, n, kInf);
  Matrix acc = Matrix::Zero(n, n);
  out.running.push_back(acc);
  const auto bounds = piece_bounds(model, omega, 0.0, 1.0);
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const PieceField f{model, omega, bounds[p], bounds[p + 1]};
    const double len = f.b - f.a;
    const int m = std::max(2, static_cast<int>(std::ceil(per_unit * len)));
    const double h = len / m;
    for (int k = 0; k < m; ++k) {
      const double lo = f.a + k * h;
      const double mid = lo + 0.5 * h;
      for (double t : {lo, lo + h}) out.entry_min = out.entry_min.cwiseMin(f(t));
      for (int q = 0; q < 3; ++q) {
        const Matrix v = f(mid + 0.5 * h * gl_x[q]);
        out.entry_min = out.entry_min.cwiseMin(v);
        acc += 0.5 * h * gl_w[q] * v;
        out.row_max_integral += 0.5 * h * gl_w[q] * row_max_sum(v);
      }
      out.running.push_back(acc);
    }
  }
  return out;
}

struct Minima {
  Vector a_tilde;
  Matrix a_bar;
  Matrix entry_min;
  double row_max_integral = 0.0;
};

Minima minima_of(const GridPass& g, int n) {
  Minima m;
  m.a_tilde = Vector::Zero(n);
  m.a_bar = Matrix::Zero(n, n);
  const Matrix& total = g.running.back();
  for (const Matrix& r : g.running) {
    m.a_tilde = m.a_tilde.cwiseMin(r.diagonal());
    m.a_bar = m.a_bar.cwiseMin(total - r);
  }
  m.entry_min = g.entry_min;
  m.row_max_integral = g.row_max_integral;
  return m;
}

double max_change(const Minima& x, const Minima& y) {
  double d = (x.a_tilde - y.a_tilde).cwiseAbs().maxCoeff();
  d = std::max(d, (x.a_bar - y.a_bar).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(x.row_max_integral - y.row_max_integral));
  return d;
}

std::vector<int> greedy_chain(const Matrix& entry_min, int start) {
  const int n = static_cast<int>(entry_min.rows());
  std::vector<int> chain{start};
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[static_cast<std::size_t>(start)] = true;
  while (static_cast<int>(chain.size()) < n) {
    const int cur = chain.back();
    int best = -1;
    double best_val = -kInf;
    for (int j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      // Coupling from the current coordinate into j.
      if (entry_min(j, cur) > best_val) {
        best_val = entry_min(j, cur);
        best = j;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    chain.push_back(best);
  }
  return chain;
}

double chain_link_min(const Matrix& entry_min, const std::vector<int>& chain) {
  double v = kInf;
  for (std::size_t l = 0; l + 1 < chain.size(); ++l) v = std::min(v, entry_min(chain[l + 1], chain[l]));
  return v;
}

void validate_chain(const std::vector<int>& chain, int n, int start) {
  if (static_cast<int>(chain.size()) != n || chain.front() != start) {
    throw PreconditionError("irreducibility: chain for index " + std::to_string(start + 1) +
                            " must start there and have length N");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int j : chain) {
    if (j < 0 || j >= n || seen[static_cast<std::size_t>(j)]) {
      throw PreconditionError("irreducibility: chain for index " + std::to_string(start + 1) + " does not cover {1..N}");
    }
    seen[static_cast<std::size_t>(j)] = true;
  }
}

std::vector<DriverState> sample_omegas(const OdeModel& model, const OdeCheckOptions& opts) {
  if (opts.n_samples < 1) throw PreconditionError("ode check: n_samples must be >= 1");
  std::vector<DriverState> out;
  for (int k = 0; k < opts.n_samples; ++k) out.push_back(sample_point(model.driver(), opts.seed, static_cast<std::uint64_t>(k)));
  return out;
}

AssumptionReport moment(std::string id, std::string note, const std::vector<double>& values, bool certain) {
  AssumptionReport rep;
  rep.id = std::move(id);
  rep.note = std::move(note);
  rep.has_estimate = true;
  rep.estimate = mean_ci(values);
  const bool constant = std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant && std::isfinite(values.front())) rep.estimate.half_width = 0.0;
  rep.verdict = std::isfinite(rep.estimate.mean) ? (certain ? Verdict::Holds : Verdict::Empirical) : Verdict::Fails;
  if (rep.verdict == Verdict::Fails) rep.witnesses.push_back(Witness{"non-finite sample moment", -1, -1, -1, 0.0, rep.estimate.mean});
  return rep;
}

}  // namespace

AssumptionReport check_O1(const OdeModel& model, const OdeCheckOptions& opts) {
  if (opts.t_grid < 1) throw PreconditionError("check_O1: t_grid must be >= 1");
  const Vector d = model.cone().sign_vector(model.dim());
  AssumptionReport rep{"O1", Verdict::Holds,
                       model.cone().kind() == ConeKind::Standard ? "a_ij >= 0 for i != j on sampled (omega, t)"
                                                                  : "type-K sign pattern on sampled (omega, t)"};
  const auto omegas = sample_omegas(model, opts);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    for (int g = 0; g < opts.t_grid; ++g) {
      const double t = (g + 0.5) / opts.t_grid;
      const Matrix a = d.asDiagonal() * model.field(model.driver().advance(omegas[k], t)) * d.asDiagonal();
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          if (i != j && a(i, j) < 0.0) {
            rep.verdict = Verdict::Fails;
            rep.witnesses.push_back(Witness{"off-diagonal sign violation", static_cast<int>(k), static_cast<int>(i) + 1,
                                            static_cast<int>(j) + 1, t, a(i, j) * d[i] * d[j]});
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

AssumptionReport check_O2(const OdeModel& model, const OdeCheckOptions& opts) {
  const bool typek = model.cone().kind() == ConeKind::TypeK;
  std::vector<double> values;
  for (const auto& omega : sample_omegas(model, opts)) {
    const Matrix a = model.field(omega);
    values.push_back(typek ? a.cwiseAbs().maxCoeff() : a.maxCoeff());
  }
  return moment(typek ? "P2" : "O2", typek ? "mean of max_ij |b_ij|" : "mean of max_ij a_ij", values,
                model.is_constant());
}

IrreducibilityQuantities irreducibility_quantities(const OdeModel& model, const DriverState& omega,
                                                   std::optional<double> delta, std::vector<std::vector<int>> chains) {
  if (delta && !(*delta > 0.0)) throw PreconditionError("irreducibility: delta must be > 0");
  const int n = model.dim();

  IrreducibilityQuantities q;
  int per_unit = 16;
  Minima prev = minima_of(grid_pass(model, omega, per_unit), n);
  constexpr int kMaxPerUnit = 1 << 14;
  while (per_unit < kMaxPerUnit) {
    per_unit *= 2;
    Minima next = minima_of(grid_pass(model, omega, per_unit), n);
    const double change = max_change(prev, next);
    prev = std::move(next);
    if (change < 1e-8) {
      q.grid_converged = true;
      break;
    }
  }
  q.grid_per_unit = per_unit;
  q.a_tilde = prev.a_tilde;
  q.a_bar = prev.a_bar;
  q.entry_min = prev.entry_min;
  q.beta_upper = std::exp(prev.row_max_integral);

  if (chains.empty()) {
    for (int i = 0; i < n; ++i) chains.push_back(greedy_chain(q.entry_min, i));
  }
  if (static_cast<int>(chains.size()) != n) throw PreconditionError("irreducibility: need one chain per index");
  double link_min = kInf;
  for (int i = 0; i < n; ++i) {
    validate_chain(chains[static_cast<std::size_t>(i)], n, i);
    const double v = chain_link_min(q.entry_min, chains[static_cast<std::size_t>(i)]);
    if (delta && v < *delta) {
      std::ostringstream os;
      os.precision(17);
      os << "irreducibility: chain for index " << i + 1 << " has a link of size " << v << " < delta = " << *delta;
      throw PreconditionError(os.str());
    }
    link_min = std::min(link_min, v);
  }
  if (n == 1) link_min = 1.0;  // no links; delta only scales empty products
  q.delta = delta ? *delta : link_min;
  if (!(q.delta > 0.0)) throw PreconditionError("irreducibility: no chain with a positive lower bound (delta <= 0)");
  q.chains = std::move(chains);

  q.beta_i = Vector(n);
  for (int i = 0; i < n; ++i) {
    const auto& ch = q.chains[static_cast<std::size_t>(i)];
    double expo = q.a_tilde[ch[0]];
    double factor = 1.0;  // delta^k / k!
    double best = std::exp(expo);
    for (int k = 1; k < n; ++k) {
      expo += q.a_bar(ch[static_cast<std::size_t>(k)], ch[static_cast<std::size_t>(k)]);
      factor *= q.delta / k;
      best = std::min(best, std::exp(expo) * factor);
    }
    q.beta_i[i] = best;
  }
  q.beta_lower = q.beta_i.minCoeff();

  q.delta_tilde = kInf;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) q.delta_tilde = std::min(q.delta_tilde, q.entry_min(i, j));
    }
  }
  if (n == 1) q.delta_tilde = 1.0;
  if (q.delta_tilde > 0.0) {
    q.beta_tilde_i = Vector(n);
    for (int i = 0; i < n; ++i) {
      double best = std::exp(q.a_tilde[i]);
      for (int j = 0; j < n; ++j) {
        if (j != i) best = std::min(best, std::exp(q.a_tilde[i] + q.a_bar(j, j)) * q.delta_tilde);
      }
      q.beta_tilde_i[i] = best;
    }
    q.beta_tilde_lower = q.beta_tilde_i.minCoeff();
  } else {
    q.beta_tilde_lower = 0.0;
  }
  return q;
}

std::vector<AssumptionReport> check_O3(const OdeModel& model, const OdeCheckOptions& opts) {
  const auto omegas = sample_omegas(model, opts);
  const bool certain = model.is_constant();
  std::vector<AssumptionReport> out;

  std::vector<IrreducibilityQuantities> qs;
  AssumptionReport chain{"O3.i", Verdict::Holds, "greedy chain with positive smallest link on a grid of [0, 1]"};
  AssumptionReport offdiag{"O3'.i", Verdict::Holds, "min off-diagonal entry over a grid of [0, 1] is positive"};
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    try {
      qs.push_back(irreducibility_quantities(model, omegas[k]));
      if (!(qs.back().delta_tilde > 0.0) && offdiag.verdict == Verdict::Holds) {
        offdiag.verdict = Verdict::Fails;
        offdiag.witnesses.push_back(Witness{"off-diagonal minimum", static_cast<int>(k), -1, -1, 0.0, qs.back().delta_tilde});
      }
    } catch (const PreconditionError& e) {
      chain.verdict = Verdict::Fails;
      offdiag.verdict = Verdict::Fails;
      chain.witnesses.push_back(Witness{e.what(), static_cast<int>(k), -1, -1, 0.0, 0.0});
      offdiag.witnesses = chain.witnesses;
      break;
    }
  }
  if (!qs.empty()) chain.note += " (grid " + std::to_string(qs.front().grid_per_unit) + " per unit)";

  auto emit = [&](const std::string& prefix, const AssumptionReport& first, bool tilde) {
    out.push_back(first);
    if (first.verdict == Verdict::Fails) {
      for (const char* s : {".ii", ".iii", ".iv"}) {
        AssumptionReport r{prefix + s, Verdict::Fails, "requires " + first.id};
        r.witnesses = first.witnesses;
        out.push_back(std::move(r));
      }
      return;
    }
    std::vector<double> ii, iii, iv;
    for (const auto& q : qs) {
      const double lo = tilde ? q.beta_tilde_lower : q.beta_lower;
      const double ratio = std::log(q.beta_upper) - std::log(lo);
      ii.push_back(log_plus(ratio));
      iii.push_back(ratio);
      iv.push_back(log_minus(lo));
    }
    const std::string b = tilde ? "beta~_lower" : "beta_lower";
    out.push_back(moment(prefix + ".ii", "mean of ln+ ln(beta_upper / " + b + ")", ii, certain));
    out.push_back(moment(prefix + ".iii", "mean of ln(beta_upper / " + b + ")", iii, certain));
    out.push_back(moment(prefix + ".iv", "mean of ln- " + b, iv, certain));
  };
  emit("O3", chain, false);
  emit("O3'", offdiag, true);
  return out;
}

double l1_growth_log_bound(const OdeModel& model, const DriverState& omega, double t) {
  if (!(t >= 0.0)) throw PreconditionError("l1_growth_bound: t must be >= 0");
  if (t == 0.0) return 0.0;
  const auto bounds = piece_bounds(model, omega, 0.0, t);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const double margin = detail::piece_margin(bounds[p], bounds[p + 1]);
    const DriverState start = model.driver().advance(omega, bounds[p] + margin);
    total += detail::piece_integral(
        [&](double u) { return row_max_sum(model.field(model.driver().advance(start, u))); }, bounds[p + 1] - bounds[p],
        margin);
  }
  return total;
}

double l1_growth_bound(const OdeModel& model, const DriverState& omega, double t) {
  return std::exp(l1_growth_log_bound(model, omega, t));
}

double kappa_functional(const Matrix& a, const Vector& w) {
  if (a.rows() != a.cols() || a.rows() != w.size()) throw DimensionError("kappa_functional: size mismatch");
  if (std::abs(w.norm() - 1.0) > 1e-10) throw PreconditionError("kappa_functional: w must be a unit vector");
  return w.dot(a * w);
}

OdeModel typek_to_cooperative(const OdeModel& b_model, int k, int l, const OdeCheckOptions& opts) {
  if (k + l != b_model.dim()) throw DimensionError("typek_to_cooperative: k + l must equal N");
  const Cone cone = Cone::type_k(k, l);
  const OdeModel typed = b_model.with_cone(cone, b_model.description());
  const AssumptionReport p1 = check_O1(typed, opts);
  if (p1.verdict == Verdict::Fails) {
    const Witness& w = p1.witnesses.front();
    std::ostringstream os;
    os.precision(17);
    os << "type-K monotonicity fails: b_" << w.row << w.col << " = " << w.value << " at sample " << w.sample
       << ", t = " << w.time;
    throw PositivityViolation(os.str());
  }
  const Vector d = cone.sign_vector(b_model.dim());
  const OdeModel inner = b_model;
  return OdeModel(
      b_model.dim(), b_model.driver(),
      [inner, d](const DriverState& omega) { return Matrix(d.asDiagonal() * inner.field(omega) * d.asDiagonal()); },
      Cone::standard(), b_model.is_constant(), "cooperative(" + b_model.description() + ")");
}

}  // namespace posdyn
