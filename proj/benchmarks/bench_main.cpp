#include <random>

#include <benchmark/benchmark.h>

#include "gridrecover/builtin.hpp"
#include "gridrecover/nnls.hpp"
#include "gridrecover/recovery.hpp"
#include "gridrecover/sparsifier.hpp"
#include "gridrecover/vandermonde.hpp"

using namespace gridrecover;

namespace {

void BM_SolveNnls(benchmark::State& state) {
  const auto rows = state.range(0), cols = state.range(1);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = z(rng);
    b(i) = z(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_nnls(A, b));
}
BENCHMARK(BM_SolveNnls)->Args({200, 15})->Args({1000, 91})->Unit(benchmark::kMillisecond);

void BM_EffectiveResistances(benchmark::State& state) {
  const auto [c, s] = split_graphs(builtin::heawood_dc(1));
  for (auto _ : state) benchmark::DoNotOptimize(effective_resistances(c));
}
BENCHMARK(BM_EffectiveResistances);

void BM_AssembleComplete(benchmark::State& state) {
  const Network net = builtin::heawood_dc(2);
  const StateSet set = generate_voltage_driven(net, static_cast<std::size_t>(state.range(0)), {}, 3);
  const EdgeSet edges = complete_edges(net.n());
  for (auto _ : state) benchmark::DoNotOptimize(assemble(edges, set));
}
BENCHMARK(BM_AssembleComplete)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_RecoverFeeder(benchmark::State& state) {
  const StateSet set = builtin::make("table1_dc", 0).sample(200, 4);
  RecoveryConfig cfg;
  cfg.stopping.max_wall_time = 0.0;
  cfg.stopping.max_iterations = 500;
  for (auto _ : state) benchmark::DoNotOptimize(recover(set, 6, cfg));
}
BENCHMARK(BM_RecoverFeeder)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
