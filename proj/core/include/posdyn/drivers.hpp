#pragma once

// Ergodic base systems theta_t on a probability space: i.i.d. shifts,
// stationary Markov shifts and the irrational rotation of the 2-torus.
//
// Shift drivers are index based. The randomness attached to index n is a
// counter-mode hash of (key, n, slot), so theta_{-m} omega is as cheap and
// exact as theta_m omega and no history is stored.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "posdyn/types.hpp"

namespace posdyn {

enum class TimeKind { Discrete, Continuous };
enum class DriverKind { IidShift, MarkovShift, TorusRotation };

/// sqrt(2) - 1, a floating stand-in for an irrational rotation number.
inline constexpr double kDefaultRho = std::numbers::sqrt2 - 1.0;

/// Position on a shift space. For continuous time the phase in [0, 1) is the
/// elapsed fraction of the current unit interval.
struct ShiftState {
  std::uint64_t key = 0;
  std::int64_t index = 0;
  double phase = 0.0;
  int chain_state = 0;
  bool operator==(const ShiftState&) const = default;
};

/// Point (x1, x2) of the torus written as (0, 1] x (0, 1].
struct TorusState {
  double x1 = 1.0;
  double x2 = 1.0;
  bool operator==(const TorusState&) const = default;
};

using DriverState = std::variant<ShiftState, TorusState>;

/// Uniform variate in [0, 1) attached to (key, index, slot).
double counter_uniform(std::uint64_t key, std::int64_t index, std::uint64_t slot);

/// SplitMix64 finalizer; used to derive stream keys from user seeds.
std::uint64_t mix64(std::uint64_t x);

class Driver {
 public:
  static Driver iid(TimeKind time = TimeKind::Discrete);
  /// Row-stochastic, irreducible transition matrix; the chain is started
  /// in its stationary law and is two-sided (time reversal for n < 0).
  static Driver markov(const Matrix& transition, TimeKind time = TimeKind::Discrete);
  /// theta_t(x1, x2) = (x1 + t, x2 + rho t) mod 1, continuous time.
  static Driver torus(double rho = kDefaultRho);

  DriverKind kind() const { return kind_; }
  TimeKind time() const { return time_; }
  bool discrete() const { return time_ == TimeKind::Discrete; }
  double rho() const { return rho_; }
  int chain_states() const { return static_cast<int>(transition_.rows()); }
  const Matrix& transition() const { return transition_; }
  const Vector& stationary() const { return stationary_; }

  /// Deterministic in (driver, seed); distinct seeds give unrelated streams.
  DriverState sample_initial(std::uint64_t seed) const;

  /// theta_t omega. Discrete drivers reject non-integer t.
  DriverState advance(const DriverState& state, double t) const;

  /// Discontinuity times tau in (t0, t1) of tau -> theta_tau omega, sorted.
  /// These are integer crossings of the shift phase, or the torus wrap
  /// times where x1 + tau or x2 + rho tau reaches an integer.
  std::vector<double> breakpoints(const DriverState& state, double t0, double t1) const;

  /// Torus wrap times in (0, t] for t > 0.
  std::vector<double> wrap_times(const TorusState& state, double t) const;

  /// Uniform variate attached to the current index of a shift state.
  static double uniform(const ShiftState& s, std::uint64_t slot) {
    return counter_uniform(s.key, s.index, slot);
  }

  std::string describe() const;

 private:
  Driver() = default;
  int chain_at(std::uint64_t key, std::int64_t index) const;
  int step_chain(int from, const Matrix& kernel, double u) const;

  DriverKind kind_ = DriverKind::IidShift;
  TimeKind time_ = TimeKind::Discrete;
  double rho_ = kDefaultRho;
  Matrix transition_;
  Matrix reversed_;
  Vector stationary_;
};

/// The k-th of a family of independent sample points derived from seed.
inline DriverState sample_point(const Driver& driver, std::uint64_t seed, std::uint64_t k) {
  return driver.sample_initial(mix64(seed) + k);
}

}  // namespace posdyn
