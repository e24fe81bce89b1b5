#include <benchmark/benchmark.h>

#include "wake/solver.hpp"

using namespace wake;

namespace {

Params sized(int ny, int nt) {
  Params prm;
  prm.strouhal = 2.0;
  prm.Ny = ny;
  prm.Nt = nt;
  prm.L = ny;  // dy = 2
  return prm;
}

}  // namespace

static void BM_MapConstruction(benchmark::State& st) {
  const Params prm = sized(static_cast<int>(st.range(0)), 2);
  const Grid g = Grid::make(prm);
  for (auto _ : st) benchmark::DoNotOptimize(DuhamelMap(g, prm));
}
BENCHMARK(BM_MapConstruction)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_LinearEvolution(benchmark::State& st) {
  const Params prm = sized(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Grid g = Grid::make(prm);
  const DuhamelMap map(g, prm);
  const BoundaryData b = make_boundary(BoundaryFamily::gaussian_wake, 0.01, 1, g, prm);
  for (auto _ : st) benchmark::DoNotOptimize(map.linear(b));
}
BENCHMARK(BM_LinearEvolution)->ArgsProduct({{512, 4096}, {0, 2}})->Unit(benchmark::kMillisecond);

// One Picard sweep on 160 stations: sources at every station, then the Duhamel integrals.
static void BM_PicardSweep(benchmark::State& st) {
  const Params prm = sized(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Grid g = Grid::make(prm);
  const DuhamelMap map(g, prm);
  const BoundaryData b = make_boundary(BoundaryFamily::gaussian_wake, 0.01, 1, g, prm);
  const FlowState s = map.linear(b);
  for (auto _ : st) benchmark::DoNotOptimize(map(b, s));
}
BENCHMARK(BM_PicardSweep)->ArgsProduct({{512, 4096}, {0, 2}})->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_StateNorm(benchmark::State& st) {
  const Params prm = sized(static_cast<int>(st.range(0)), 2);
  const Grid g = Grid::make(prm);
  const DuhamelMap map(g, prm);
  const FlowState s = map.linear(make_boundary(BoundaryFamily::gaussian_wake, 0.01, 1, g, prm));
  for (auto _ : st) benchmark::DoNotOptimize(state_norm(s, g, prm));
}
BENCHMARK(BM_StateNorm)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond)->Iterations(2);

static void BM_PanelWeights(benchmark::State& st) {
  const cplx lam(-0.3, 1.7);
  double h = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(panel_weights(lam, h));
    h = h < 10 ? h * 1.01 : 0.1;  // both branches
  }
}
BENCHMARK(BM_PanelWeights);
