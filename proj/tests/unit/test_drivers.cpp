#include <cmath>
#include <random>

#include "doctest.h"
#include "posdyn/drivers.hpp"
#include "posdyn/matrix_model.hpp"

using namespace posdyn;

namespace {

double torus_gap(const TorusState& a, const TorusState& b) {
  // Distance on the circle in each coordinate.
  auto d = [](double x, double y) {
    const double r = std::abs(x - y);
    return std::min(r, 1.0 - r);
  };
  return std::max(d(a.x1, b.x1), d(a.x2, b.x2));
}

}  // namespace

TEST_CASE("sampling is deterministic in the seed") {
  const Driver t = Driver::torus();
  const auto a = std::get<TorusState>(t.sample_initial(7));
  const auto b = std::get<TorusState>(t.sample_initial(7));
  CHECK(a == b);
  CHECK(a.x1 > 0.0);
  CHECK(a.x1 <= 1.0);
  CHECK(a.x2 > 0.0);
  CHECK(a.x2 <= 1.0);
}

TEST_CASE("distinct seeds give different i.i.d. emissions") {
  Matrix lo = Matrix::Zero(2, 2), hi = Matrix::Ones(2, 2);
  const MatrixModel m = MatrixModel::iid_uniform_entries(lo, hi);
  const Matrix s1 = m.emit(m.driver().sample_initial(1));
  const Matrix s2 = m.emit(m.driver().sample_initial(2));
  CHECK((s1 - s2).norm() > 0.0);
}

TEST_CASE("one-state Markov chain is constant") {
  const Driver d = Driver::markov(Matrix::Ones(1, 1));
  DriverState s = d.sample_initial(3);
  for (int n = 0; n < 20; ++n) {
    CHECK(std::get<ShiftState>(s).chain_state == 0);
    s = d.advance(s, 1);
  }
}

TEST_CASE("torus advance follows the rotation") {
  const Driver d = Driver::torus();
  const auto s = std::get<TorusState>(d.advance(TorusState{0.25, 0.5}, 1.0));
  CHECK(s.x1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.x2 == doctest::Approx(0.5 + kDefaultRho).epsilon(1e-15));
  CHECK(std::get<TorusState>(d.advance(TorusState{0.25, 0.5}, 0.0)) == TorusState{0.25, 0.5});
  const auto back = std::get<TorusState>(d.advance(d.advance(TorusState{0.25, 0.5}, 1.0), -1.0));
  CHECK(torus_gap(back, TorusState{0.25, 0.5}) <= 1e-15);
}

TEST_CASE("discrete drivers reject fractional time") {
  const Driver d = Driver::iid();
  CHECK_THROWS_AS(d.advance(d.sample_initial(1), 0.5), PreconditionError);
}

TEST_CASE("semigroup law: exact for shifts, tight for the torus") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> step(-500, 500);
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.4, 0.6;
  for (const Driver& d : {Driver::iid(), Driver::markov(p), Driver::iid(TimeKind::Continuous)}) {
    const DriverState w = d.sample_initial(9);
    for (int k = 0; k < 50; ++k) {
      const double s = step(rng), t = step(rng);
      CHECK(d.advance(d.advance(w, s), t) == d.advance(w, s + t));
    }
  }
  const Driver tor = Driver::torus();
  std::uniform_real_distribution<double> real(-500.0, 500.0);
  const auto w = tor.sample_initial(9);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double s = real(rng), t = real(rng);
    worst = std::max(worst, torus_gap(std::get<TorusState>(tor.advance(tor.advance(w, s), t)),
                                      std::get<TorusState>(tor.advance(w, s + t))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("torus wrap times are the integer crossings") {
  const Driver d = Driver::torus(0.5);
  const auto wraps = d.wrap_times(TorusState{0.75, 0.25}, 2.0);
  // x1 crosses at 0.25, 1.25; x2 = 0.25 + t/2 crosses at 1.5.
  REQUIRE(wraps.size() == 3);
  CHECK(wraps[0] == doctest::Approx(0.25));
  CHECK(wraps[1] == doctest::Approx(1.25));
  CHECK(wraps[2] == doctest::Approx(1.5));
  const auto bps = d.breakpoints(TorusState{0.75, 0.25}, 0.5, 2.0);
  REQUIRE(bps.size() == 2);
  CHECK(bps[0] == doctest::Approx(1.25));
}

TEST_CASE("Markov chain visits states at the stationary frequencies") {
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.3, 0.7;
  const Driver d = Driver::markov(p);
  // Stationary law (0.75, 0.25).
  CHECK(d.stationary()[0] == doctest::Approx(0.75));
  DriverState s = d.sample_initial(5);
  int zeros = 0;
  for (int n = 0; n < 40000; ++n) {
    zeros += std::get<ShiftState>(s).chain_state == 0;
    s = d.advance(s, 1);
  }
  CHECK(zeros / 40000.0 == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("i.i.d. emissions at distinct indices are independent (chi-square)") {
  // Pairs (u_n, u_{n+1}) binned on a 4x4 grid; 15 degrees of freedom.
  const Driver d = Driver::iid();
  const auto s0 = std::get<ShiftState>(d.sample_initial(11));
  int counts[4][4] = {};
  const int n = 16000;
  for (int k = 0; k < n; ++k) {
    const int a = static_cast<int>(4.0 * counter_uniform(s0.key, 2 * k, 0));
    const int b = static_cast<int>(4.0 * counter_uniform(s0.key, 2 * k + 1, 0));
    ++counts[a][b];
  }
  double chi2 = 0.0;
  const double expected = n / 16.0;
  for (auto& row : counts) {
    for (int c : row) chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 37.7);  // 0.999 quantile of chi-square(15)
}
