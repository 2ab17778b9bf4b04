// Parallel kernels against their serial references. The argument selects the variant:
// 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "wws/bundle.hpp"
#include "wws/symbols.hpp"

using namespace wws;

namespace {

void BM_MaterializeColumns(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const int n = static_cast<int>(state.range(1));
  const Grid g(n, 400.0);
  const WeightParams w = WeightParams::make(0.5, 0.1);
  const RVec x = g.nodes();
  const RVec c = (1.0 + 0.01 * (-(x / 30.0).array().square()).exp()).matrix();
  const Pipeline p{multiplier(sym::S(w.gamma), g, w, Nyquist::Cosine), pointwise("c", g, c),
                   multiplier(sym::derivative(), g, w, Nyquist::Cosine)};
  for (auto _ : state) {
    CMat M = parallel ? materialize(p, g) : materialize_serial(p, g);
    benchmark::DoNotOptimize(M.data());
  }
  state.SetLabel(parallel ? "parallel" : "serial");
}

void BM_ContourSamples(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const Grid g(static_cast<int>(state.range(1)), 40.0);
  const Bundle B = Bundle::kdv(g, 0.5);
  const Contour C = half_disc_contour(2.0, -0.075);
  for (auto _ : state) {
    const ContourResult r = winding_multiplicity(B, C, 8, parallel);
    benchmark::DoNotOptimize(r.winding);
  }
  state.SetLabel(parallel ? "parallel" : "serial");
}

void BM_SymbolSweeps(benchmark::State& state) {
  InequalitySuiteOptions o;
  o.parallel = state.range(0) != 0;
  o.k_points = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const auto checks = inequality_suite(o);
    benchmark::DoNotOptimize(checks.data());
  }
  state.SetLabel(o.parallel ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_MaterializeColumns)->ArgsProduct({{0, 1}, {128, 256, 512}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContourSamples)->ArgsProduct({{0, 1}, {128, 256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SymbolSweeps)->ArgsProduct({{0, 1}, {10000, 100000}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  ensure_blas_kernel(argv);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
