#include <benchmark/benchmark.h>

#include "sparsegd/problem.hpp"

namespace {

using namespace sparsegd;

void BM_GenDesign(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index p = state.range(1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const DesignMatrix d = gen_design(n, p, DesignKind::rademacher, seed++);
    benchmark::DoNotOptimize(d.entries.data());
  }
}
BENCHMARK(BM_GenDesign)->Args({100, 200})->Args({500, 3000});

void BM_Coherence(benchmark::State& state) {
  const DesignMatrix d = gen_design(state.range(0), state.range(1), DesignKind::rademacher, 7);
  for (auto _ : state) benchmark::DoNotOptimize(coherence(d));
}
BENCHMARK(BM_Coherence)->Args({100, 200})->Args({500, 1000});

}  // namespace
