#include <benchmark/benchmark.h>

#include "posdyn/estimators.hpp"
#include "posdyn/integrator.hpp"
#include "posdyn/leslie.hpp"
#include "posdyn/matrix_cocycle.hpp"
#include "posdyn/torus_example.hpp"

using namespace posdyn;

namespace {

MatrixModel uniform_model(int n) {
  return MatrixModel::iid_uniform_entries(Matrix::Constant(n, n, 0.1), Matrix::Constant(n, n, 1.5));
}

void BM_CocycleProduct(benchmark::State& state) {
  const MatrixModel m = uniform_model(static_cast<int>(state.range(0)));
  const DriverState w = m.driver().sample_initial(1);
  for (auto _ : state) benchmark::DoNotOptimize(cocycle_product(m, w, 1000));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_CocycleProduct)->Arg(2)->Arg(3)->Arg(8)->Arg(32);

void BM_ForwardFloquetMatrix(benchmark::State& state) {
  const MatrixCocycle c(uniform_model(3));
  const DriverState w = c.driver().sample_initial(1);
  const Vector u0 = Cone::standard().interior_unit(3);
  for (auto _ : state) benchmark::DoNotOptimize(forward_floquet(c, w, u0, 10000.0));
}
BENCHMARK(BM_ForwardFloquetMatrix)->Unit(benchmark::kMillisecond);

void BM_OseledetsQr(benchmark::State& state) {
  const MatrixCocycle c(uniform_model(3));
  const DriverState w = c.driver().sample_initial(1);
  for (auto _ : state) benchmark::DoNotOptimize(oseledets_qr(c, w, 10000.0));
}
BENCHMARK(BM_OseledetsQr)->Unit(benchmark::kMillisecond);

void BM_TorusPropagator(benchmark::State& state) {
  const OdeModel m = torus_example_model();
  const DriverState w = m.driver().sample_initial(1);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagator(m, w, t));
}
BENCHMARK(BM_TorusPropagator)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TorusSeparation(benchmark::State& state) {
  const OdeCocycle c(torus_example_model());
  const DriverState w = c.driver().sample_initial(1);
  for (auto _ : state) benchmark::DoNotOptimize(separation_estimate(c, w, 50.0));
}
BENCHMARK(BM_TorusSeparation)->Unit(benchmark::kMillisecond);

void BM_TorusOrbitIntegral(benchmark::State& state) {
  const Driver d = Driver::torus();
  const DriverState w = d.sample_initial(1);
  const Observable a = [](const DriverState& s) { return torus_a(std::get<TorusState>(s)); };
  for (auto _ : state) benchmark::DoNotOptimize(orbit_integral(a, d, w, 0.0, 1000.0));
}
BENCHMARK(BM_TorusOrbitIntegral)->Unit(benchmark::kMillisecond);

void BM_LeslieNStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixModel m = leslie_model(std::vector<ParamDistribution>(n, ParamDistribution::uniform(0.1, 1.5)),
                                     std::vector<ParamDistribution>(n - 1, ParamDistribution::uniform(0.3, 0.9)));
  for (auto _ : state) benchmark::DoNotOptimize(leslie_nstep_positive(m, 1, 100));
}
BENCHMARK(BM_LeslieNStep)->Arg(2)->Arg(5)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
