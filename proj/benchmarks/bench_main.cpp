#include <benchmark/benchmark.h>

#include "plhom/experiments.hpp"
#include "plhom/prufer.hpp"

using namespace plhom;

namespace {

void BM_TrigEval(benchmark::State& state) {
  const PTrig trig(3.0);
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    benchmark::DoNotOptimize(trig.sin_p(x));
    benchmark::DoNotOptimize(trig.cos_p(x));
  }
}
BENCHMARK(BM_TrigEval);

void BM_TrigConstruct(benchmark::State& state) {
  for (auto _ : state) {
    PTrig trig(2.5);
    benchmark::DoNotOptimize(trig.pi_p());
  }
}
BENCHMARK(BM_TrigConstruct)->Unit(benchmark::kMillisecond);

void BM_IntegratePhase(benchmark::State& state) {
  const double eps = 1.0 / state.range(0);
  const auto spec = ProblemSpec::make(2.0, build_weight({"two-plus-sin", {}}), eps);
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_phase(spec, 10.0).phi_end);
}
BENCHMARK(BM_IntegratePhase)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveEigen(benchmark::State& state) {
  const double eps = 1.0 / state.range(0);
  const auto spec = ProblemSpec::make(2.0, build_weight({"two-plus-sin", {}}), eps);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_eigen(spec, 1, 1e-8).lambda);
}
BENCHMARK(BM_SolveEigen)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_FdOracle(benchmark::State& state) {
  const auto spec = ProblemSpec::make(2.0, build_weight({"two-plus-sin", {}}), 0.125);
  for (auto _ : state)
    benchmark::DoNotOptimize(fd_oracle_p2(spec, 1, static_cast<int>(state.range(0))).lambda);
}
BENCHMARK(BM_FdOracle)->Arg(4000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
