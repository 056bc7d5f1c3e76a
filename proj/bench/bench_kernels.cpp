#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "polarize/hierarchy.hpp"
#include "polarize/lp.hpp"
#include "polarize/nmf.hpp"

using namespace polarize;

namespace {

const Problem& instance() {
  static const Problem p = nested_rectangles_problem(0.6, 0.3);
  return p;
}

HierarchySpec spec(int level) { return HierarchySpec{level}; }

// range(0): level, range(1): OpenMP threads
void BM_build_parallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(build_lp(instance(), spec(static_cast<int>(state.range(0)))));
}

void BM_build_reference(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference::build_lp(instance(), spec(static_cast<int>(state.range(0)))));
}

std::vector<double> random_point(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

void BM_violation_parallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  static const LinearProgram lp = build_lp(instance(), spec(3));
  const auto x = random_point(lp.num_variables());
  for (auto _ : state) benchmark::DoNotOptimize(max_violation(lp, x));
}

void BM_violation_reference(benchmark::State& state) {
  static const LinearProgram lp = build_lp(instance(), spec(3));
  const auto x = random_point(lp.num_variables());
  for (auto _ : state) benchmark::DoNotOptimize(reference::max_violation(lp, x));
}

void BM_lift(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const std::vector<PolytopePoint> pts{PolytopePoint{std::vector<double>(9, 0.25)},
                                       PolytopePoint{{1, 1, 1, 1, 0, 0, 0, 0}}};
  for (auto _ : state) benchmark::DoNotOptimize(lift_product_point(instance(), pts, 3));
}

void thread_counts(benchmark::internal::Benchmark* b) {
  const int hw = omp_get_num_procs();
  for (int level : {2, 3}) {
    b->Args({level, 1});
    if (hw > 1) b->Args({level, hw});
  }
}

void threads_only(benchmark::internal::Benchmark* b) {
  b->Arg(1);
  if (omp_get_num_procs() > 1) b->Arg(omp_get_num_procs());
}

}  // namespace

BENCHMARK(BM_build_parallel)->Apply(thread_counts)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_reference)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_violation_parallel)->Apply(threads_only)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_violation_reference)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_lift)->Apply(threads_only)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
