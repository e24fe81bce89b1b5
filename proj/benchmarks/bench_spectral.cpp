#include <benchmark/benchmark.h>

#include <random>

#include "wake/nonlinearity.hpp"

using namespace wake;

namespace {

// smooth, real-field random modes
Slice smooth_random(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Slice s(g);
  for (int n = -g.nt; n <= g.nt; ++n)
    for (int i = 0; i < g.ny; ++i)
      if (i != g.nyquist()) s(n, i) = cplx(nd(rng), nd(rng)) * std::exp(-g.k[i] * g.k[i] - 0.3 * std::abs(n));
  enforce_reality(s, g);
  return s;
}

}  // namespace

static void BM_TransformRoundTrip(benchmark::State& st) {
  const int ny = static_cast<int>(st.range(0));
  const Transform tr(ny, 100.0);
  std::vector<cplx> f(ny, cplx(1.0, 0.5));
  for (auto _ : st) {
    tr.to_y(f.data(), f.data());
    tr.to_k(f.data(), f.data());
    benchmark::DoNotOptimize(f.data());
  }
  st.SetItemsProcessed(st.iterations() * ny);
}
BENCHMARK(BM_TransformRoundTrip)->Arg(512)->Arg(4096)->Arg(8192)->Arg(6144);

// The direct sum costs O(nt^2) per grid point, the padded t-transform O(nt log nt) plus its
// fixed overhead; the automatic switch sits where the two meet.
static void BM_ModeConvolution(benchmark::State& st) {
  const int nt = static_cast<int>(st.range(0));
  const auto how = st.range(1) ? ModeConvolution::transform : ModeConvolution::direct;
  const Grid g = Grid::make(1024, nt, 200.0, {20.0});
  const Slice a = smooth_random(g, 1), b = smooth_random(g, 2);
  for (auto _ : st) benchmark::DoNotOptimize(dealiased_product(a, b, g, how));
  st.SetLabel(st.range(1) ? "transform" : "direct");
}
BENCHMARK(BM_ModeConvolution)
    ->ArgsProduct({{1, 2, 4, 6, 8, 10, 12, 16, 24}, {0, 1}})
    ->Unit(benchmark::kMicrosecond);

static void BM_QuadsOneStation(benchmark::State& st) {
  const Grid g = Grid::make(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 400.0, {20.0});
  const Slice u = smooth_random(g, 1), v = smooth_random(g, 2), w = smooth_random(g, 3);
  for (auto _ : st) benchmark::DoNotOptimize(compute_quads(u, v, w, g));
}
BENCHMARK(BM_QuadsOneStation)->ArgsProduct({{512, 4096}, {0, 2}})->Unit(benchmark::kMicrosecond);

static void BM_CompositeNorm(benchmark::State& st) {
  const Grid g = Grid::make(static_cast<int>(st.range(0)), 2, 400.0, {20.0});
  const Transform tr(g);
  const Params prm;
  const Slice u = smooth_random(g, 1), v = smooth_random(g, 2), w = smooth_random(g, 3);
  for (auto _ : st) benchmark::DoNotOptimize(composite_norm(u, v, w, g, tr, prm, 20.0));
}
BENCHMARK(BM_CompositeNorm)->Arg(512)->Arg(4096)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
