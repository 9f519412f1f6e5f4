// Serial reference kernels versus their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>

#include "dicke/evaluator.hpp"
#include "dicke/kernels.hpp"
#include "dicke/residue_engine.hpp"

namespace {

using dicke::Execution;

Execution mode(const benchmark::State& s) {
  return s.range(1) ? Execution::parallel : Execution::serial;
}

void BM_CoefficientMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dicke::LadderModel model(n);
  for (auto _ : state) benchmark::DoNotOptimize(dicke::coefficient_matrix(model, n, mode(state)));
}

void BM_BuildFloatPlan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dicke::LadderModel model(n);
  const auto mat = dicke::coefficient_matrix(model, n, Execution::serial);
  const long bits = dicke::default_precision(model) * 4;
  for (auto _ : state)
    benchmark::DoNotOptimize(dicke::kernels::build_float_plan(mat.rows, bits, mode(state)));
}

void BM_EvaluateRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dicke::LadderModel model(n);
  const auto mat = dicke::coefficient_matrix(model, n, Execution::serial);
  const auto plan =
      dicke::kernels::build_float_plan(mat.rows, dicke::default_precision(model) * 4, Execution::serial);
  const double tau = std::log(static_cast<double>(n)) / n;
  for (auto _ : state) benchmark::DoNotOptimize(dicke::kernels::evaluate_rows(plan, tau, mode(state)));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {50, 200, 500})
    for (int par : {0, 1}) b->Args({n, par});
  b->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_CoefficientMatrix)->Apply(sizes);
BENCHMARK(BM_BuildFloatPlan)->Apply(sizes);
BENCHMARK(BM_EvaluateRows)->Apply(sizes);

BENCHMARK_MAIN();
