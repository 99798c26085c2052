#include <benchmark/benchmark.h>

#include "sparsegd/dynamics.hpp"
#include "sparsegd/problem.hpp"
#include "sparsegd/seeds.hpp"

namespace {

using namespace sparsegd;

Problem make_problem(Eigen::Index n, Eigen::Index p) {
  const DesignMatrix design = gen_design(n, p, DesignKind::rademacher, derive_seed(7, 0));
  const NoiseVector noise = gen_noise(n, 0.5, derive_seed(7, 1));
  std::vector<Eigen::Index> support{0, 1, 2, 3, 4};
  const SparseSignal truth = gen_signal(p, support, {1, 1, 1, 1, 1});
  return assemble(design, truth, noise);
}

void BM_Step(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const Problem problem = make_problem(500, 3000);
  dynamics::ModelState model = dynamics::make_state(problem.p(), depth, 1e-2);
  const double eta = 1.0 / (5.0 * depth * depth);
  for (auto _ : state) {
    model = dynamics::step(model, problem, eta);
    benchmark::DoNotOptimize(model.u.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->Arg(2)->Arg(3)->Arg(5);

void BM_Run1k(benchmark::State& state) {
  const Problem problem = make_problem(100, 200);
  dynamics::RunOptions options;
  options.depth = 3;
  options.alpha = 1e-2;
  options.eta = 1.0 / 45.0;
  options.max_iter = 1000;
  options.record_every = 100;
  for (auto _ : state) {
    const dynamics::Trajectory trajectory = dynamics::run(problem, options);
    benchmark::DoNotOptimize(trajectory.records.size());
  }
}
BENCHMARK(BM_Run1k);

}  // namespace
