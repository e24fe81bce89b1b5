#include <benchmark/benchmark.h>

#include "wake/verify.hpp"

using namespace wake;

// Sampled kernel norms with refinement; the cost grows as x -> 0 where the kernels sharpen.
static void BM_KernelNorm(benchmark::State& st) {
  const double x = st.range(0) / 100.0;
  for (auto _ : st) benchmark::DoNotOptimize(kernel_norm(KernelId::K1, x, 1.0, 1.0));
  st.SetLabel("x = " + std::to_string(x));
}
BENCHMARK(BM_KernelNorm)->Arg(1)->Arg(10)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_BFunction(benchmark::State& st) {
  const double x = st.range(0) / 100.0;
  for (auto _ : st) benchmark::DoNotOptimize(B_mu_phi(x, 2.0, 0.5, 1.0));
}
BENCHMARK(BM_BFunction)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);
