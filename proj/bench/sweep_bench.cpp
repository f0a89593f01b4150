// SPDX-License-Identifier: Apache-2.0
//
// Serial against OpenMP structure sweeps. Arguments are the thread count.

#include <benchmark/benchmark.h>

#include "teamlogic/solve.hpp"

using namespace teamlogic;

namespace {

// No model with four or fewer elements, so the sweep visits every structure.
const char* const kUnsat = "A x. E y. (R(x,y) & ~R(y,y) & dep(x,y) & (A x. (~R(x,y) | ~P(x))) & P(y))";

void BM_sat_bounded(benchmark::State& state) {
  const Formula f = parse_formula(kUnsat);
  const Vocabulary vocab{{"P", 1}, {"R", 2}};
  SolveOptions options;
  options.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SatResult r = sat_bounded(f, vocab, builtin_registry(), 3, options);
    benchmark::DoNotOptimize(r.verdict);
  }
}
BENCHMARK(BM_sat_bounded)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

// Evenly sized predicate calls with the hit near the end.
bool busy(std::uint64_t i) {
  std::uint64_t h = i;
  for (int k = 0; k < 2000; ++k) h = h * 6364136223846793005ULL + 1442695040888963407ULL;
  benchmark::DoNotOptimize(h);
  return i == 9000;
}

void BM_find_first_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(find_first_serial(10000, busy));
}
BENCHMARK(BM_find_first_serial)->Unit(benchmark::kMillisecond);

void BM_find_first_parallel(benchmark::State& state) {
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(find_first_parallel(10000, busy, jobs));
}
BENCHMARK(BM_find_first_parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
