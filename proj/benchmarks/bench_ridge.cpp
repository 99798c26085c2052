#include <benchmark/benchmark.h>

#include "sparsegd/problem.hpp"
#include "sparsegd/ridge.hpp"

namespace {

using namespace sparsegd;

void BM_RidgeCv(benchmark::State& state) {
  const DesignMatrix d = gen_design(500, 100, DesignKind::rademacher, 3);
  const NoiseVector noise = gen_noise(500, 25.0, 4);
  const NoiseVector draws = gen_noise(100, 1.0, 5);
  std::vector<Eigen::Index> support;
  std::vector<double> values;
  for (Eigen::Index i = 0; i < 100; ++i) {
    support.push_back(i);
    values.push_back(draws.entries[i] == 0.0 ? 1e-12 : draws.entries[i]);
  }
  const Problem problem = assemble(d, gen_signal(100, support, values), noise);
  const auto grid = ridge::log_spaced_grid(1e-4, 1e4, 25);
  for (auto _ : state) {
    const ridge::RidgeFit fit = ridge::ridge_cv(problem.design.entries, problem.y, grid, 5, 11);
    benchmark::DoNotOptimize(fit.lambda);
  }
}
BENCHMARK(BM_RidgeCv);

}  // namespace
