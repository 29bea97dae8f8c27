// Microbenchmarks for the hot paths: uniformization rows, exact storage
// paths, diffusion integration, generator quadrature, and rate evaluation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <span>
#include <vector>

#include "subergo/cpou.hpp"
#include "subergo/jump.hpp"
#include "subergo/langevin.hpp"
#include "subergo/rates.hpp"
#include "subergo/rng.hpp"

namespace {

using namespace subergo;

void BM_SplitMix64(benchmark::State& state) {
  rng::SplitMix64 g(7u);
  double acc = 0;
  for (auto _ : state) acc += g.uniform();
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SplitMix64);

void BM_TransientRow(benchmark::State& state) {
  const jump::JumpModel model(jump::power_weights(4.0),
                              jump::power_rates(1.0, 1.0));
  const auto gen = model.generator_matrix(state.range(0));
  for (auto _ : state) {
    const auto row = jump::transient_row(gen, 0, 50.0);
    benchmark::DoNotOptimize(row.prob.data());
  }
}
BENCHMARK(BM_TransientRow)->Arg(200)->Arg(1000);

void BM_InvariantDistribution(benchmark::State& state) {
  const jump::JumpModel model(jump::geometric_weights(0.5),
                              jump::power_rates(1.0, 1.0));
  for (auto _ : state) {
    const auto law = model.invariant_distribution(state.range(0));
    benchmark::DoNotOptimize(law.pi.data());
  }
}
BENCHMARK(BM_InvariantDistribution)->Arg(60)->Arg(400);

void BM_StoragePath(benchmark::State& state) {
  const cpou::CPOUModel model(1.0, 1.0, cpou::pareto_log(3.0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto path = model.simulate_exact(2.0, 100.0, ++seed);
    benchmark::DoNotOptimize(path.segments().data());
  }
}
BENCHMARK(BM_StoragePath);

void BM_StorageGenerator(benchmark::State& state) {
  const cpou::CPOUModel model(1.0, 1.0, cpou::pareto_log(4.0));
  const auto v = cpou::log_power_lyapunov(2.0);
  const double x = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        model.generator_apply(v, std::span<const double>(&x, 1)));
  }
}
BENCHMARK(BM_StorageGenerator);

void BM_LangevinPath(benchmark::State& state) {
  const langevin::LangevinModel model(langevin::polynomial_target(1, 0.25),
                                      0.0);
  const double x0 = 1.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto path =
        model.simulate(std::span<const double>(&x0, 1), 1.0, ++seed);
    benchmark::DoNotOptimize(path.segments().data());
  }
}
BENCHMARK(BM_LangevinPath);

void BM_RateEval(benchmark::State& state) {
  const rates::RateFunction r = rates::poly_log_rate(1.5, 1.0);
  double acc = 0, t = 0;
  for (auto _ : state) {
    t += 0.1;
    acc += r(t);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_RateEval);

}  // namespace

BENCHMARK_MAIN();
