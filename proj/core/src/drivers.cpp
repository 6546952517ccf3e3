#include "posdyn/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace posdyn {
namespace {

constexpr std::uint64_t kChainSlot = 0xC4A1'0000'0000'0001ULL;

bool is_integer(double t) { return std::isfinite(t) && std::floor(t) == t; }

// Maps x to (0, 1].
long double wrap_unit(long double x) {
  long double y = x - std::floor(x);
  return y == 0.0L ? 1.0L : y;
}

bool strongly_connected(const Matrix& p) {
  const Eigen::Index n = p.rows();
  auto reach_all = [&](bool transpose) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::queue<Eigen::Index> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      const Eigen::Index i = q.front();
      q.pop();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double w = transpose ? p(j, i) : p(i, j);
        if (w > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = true;
          q.push(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t key, std::int64_t index, std::uint64_t slot) {
  std::uint64_t h = mix64(key ^ mix64(static_cast<std::uint64_t>(index) ^ mix64(slot + 0x632BE59BD9B4E019ULL)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Driver Driver::iid(TimeKind time) {
  Driver d;
  d.kind_ = DriverKind::IidShift;
  d.time_ = time;
  return d;
}

Driver Driver::markov(const Matrix& transition, TimeKind time) {
  const Eigen::Index n = transition.rows();
  if (n < 1 || transition.cols() != n) throw PreconditionError("markov driver: transition matrix must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((transition.row(i).array() < 0.0).any()) throw PreconditionError("markov driver: negative transition probability");
    if (std::abs(transition.row(i).sum() - 1.0) > 1e-12) {
      throw PreconditionError("markov driver: row " + std::to_string(i) + " is not stochastic");
    }
  }
  if (!strongly_connected(transition)) throw PreconditionError("markov driver: transition matrix is not irreducible");

  // Stationary law: pi^T (P - I) = 0 with sum(pi) = 1.
  Matrix m = transition.transpose() - Matrix::Identity(n, n);
  m.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs[n - 1] = 1.0;
  Vector pi = m.fullPivLu().solve(rhs);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();

  Driver d;
  d.kind_ = DriverKind::MarkovShift;
  d.time_ = time;
  d.transition_ = transition;
  d.stationary_ = pi;
  d.reversed_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d.reversed_(i, j) = pi[j] * transition(j, i) / pi[i];
  }
  return d;
}

Driver Driver::torus(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("torus driver: rho must lie in (0, 1)");
  Driver d;
  d.kind_ = DriverKind::TorusRotation;
  d.time_ = TimeKind::Continuous;
  d.rho_ = rho;
  return d;
}

int Driver::step_chain(int from, const Matrix& kernel, double u) const {
  double acc = 0.0;
  const Eigen::Index n = kernel.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    acc += kernel(from, j);
    if (u < acc) return static_cast<int>(j);
  }
  // Rounding in the row sum; return the last state with positive mass.
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    if (kernel(from, j) > 0.0) return static_cast<int>(j);
  }
  return 0;
}

int Driver::chain_at(std::uint64_t key, std::int64_t index) const {
  double acc = 0.0;
  const double u0 = counter_uniform(key, 0, kChainSlot);
  int s = static_cast<int>(stationary_.size()) - 1;
  for (Eigen::Index j = 0; j < stationary_.size(); ++j) {
    acc += stationary_[j];
    if (u0 < acc) {
      s = static_cast<int>(j);
      break;
    }
  }
  if (index >= 0) {
    for (std::int64_t n = 1; n <= index; ++n) s = step_chain(s, transition_, counter_uniform(key, n, kChainSlot));
  } else {
    for (std::int64_t n = -1; n >= index; --n) s = step_chain(s, reversed_, counter_uniform(key, n, kChainSlot));
  }
  return s;
}

DriverState Driver::sample_initial(std::uint64_t seed) const {
  const std::uint64_t key = mix64(seed ^ 0x5EED'0000'0000'0000ULL);
  switch (kind_) {
    case DriverKind::TorusRotation: {
      // (0, 1] rather than [0, 1).
      return TorusState{1.0 - counter_uniform(key, 0, 1), 1.0 - counter_uniform(key, 0, 2)};
    }
    case DriverKind::MarkovShift:
      return ShiftState{key, 0, 0.0, chain_at(key, 0)};
    case DriverKind::IidShift:
    default:
      return ShiftState{key, 0, 0.0, 0};
  }
}

DriverState Driver::advance(const DriverState& state, double t) const {
  if (!std::isfinite(t)) throw PreconditionError("advance: non-finite time");
  if (discrete() && !is_integer(t)) throw PreconditionError("advance: non-integer time for a discrete driver");
  if (t == 0.0) return state;

  if (kind_ == DriverKind::TorusRotation) {
    const auto& s = std::get<TorusState>(state);
    const long double x1 = wrap_unit(static_cast<long double>(s.x1) + static_cast<long double>(t));
    const long double x2 =
        wrap_unit(static_cast<long double>(s.x2) + static_cast<long double>(rho_) * static_cast<long double>(t));
    return TorusState{static_cast<double>(x1), static_cast<double>(x2)};
  }

  const auto& s = std::get<ShiftState>(state);
  ShiftState out = s;
  if (discrete()) {
    out.index = s.index + static_cast<std::int64_t>(t);
  } else {
    const double total = s.phase + t;
    const double whole = std::floor(total);
    out.index = s.index + static_cast<std::int64_t>(whole);
    out.phase = total - whole;
    if (out.phase >= 1.0) {
      out.phase = 0.0;
      out.index += 1;
    }
  }

  if (kind_ == DriverKind::MarkovShift && out.index != s.index) {
    const std::int64_t from = s.index;
    const std::int64_t to = out.index;
    if (from >= 0 && to > from) {
      int c = s.chain_state;
      for (std::int64_t n = from + 1; n <= to; ++n) c = step_chain(c, transition_, counter_uniform(s.key, n, kChainSlot));
      out.chain_state = c;
    } else if (from <= 0 && to < from) {
      int c = s.chain_state;
      for (std::int64_t n = from - 1; n >= to; --n) c = step_chain(c, reversed_, counter_uniform(s.key, n, kChainSlot));
      out.chain_state = c;
    } else {
      out.chain_state = chain_at(s.key, to);
    }
  }
  return out;
}

std::vector<double> Driver::breakpoints(const DriverState& state, double t0, double t1) const {
  std::vector<double> out;
  if (discrete() || !(t1 > t0)) return out;

  auto crossings = [&](double start, double speed) {
    // tau with start + speed * tau integer and t0 < tau < t1.
    const double lo = start + speed * t0;
    const double hi = start + speed * t1;
    for (double k = std::floor(lo) + 1.0; k < hi; k += 1.0) {
      const double tau = (k - start) / speed;
      if (tau > t0 && tau < t1) out.push_back(tau);
    }
  };

  if (kind_ == DriverKind::TorusRotation) {
    const auto& s = std::get<TorusState>(state);
    crossings(s.x1, 1.0);
    crossings(s.x2, rho_);
  } else {
    crossings(std::get<ShiftState>(state).phase, 1.0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> Driver::wrap_times(const TorusState& state, double t) const {
  if (kind_ != DriverKind::TorusRotation) throw PreconditionError("wrap_times: not a torus driver");
  std::vector<double> out = breakpoints(state, 0.0, t);
  auto hits = [&](double start, double speed) {
    const double v = start + speed * t;
    return std::abs(v - std::round(v)) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(v));
  };
  if (t > 0.0 && (hits(state.x1, 1.0) || hits(state.x2, rho_))) out.push_back(t);
  return out;
}

std::string Driver::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DriverKind::IidShift:
      os << "iid-shift";
      break;
    case DriverKind::MarkovShift:
      os << "markov-shift(" << transition_.rows() << " states)";
      break;
    case DriverKind::TorusRotation:
      os << "torus-rotation(rho=" << rho_ << ")";
      break;
  }
  os << (discrete() ? "/discrete" : "/continuous");
  return os.str();
}

}  // namespace posdyn
