#include <benchmark/benchmark.h>

#include "streamk/decompose.hpp"
#include "streamk/executor.hpp"
#include "streamk/matrix.hpp"

using namespace streamk;

namespace {

constexpr GemmProblem kProblem{512, 512, 1024, 1.0, 0.0, DType::Float32};
constexpr BlockingFactors kBlocking{128, 128, 32};

const Matrix<float>& lhs() {
  static const auto m = random_matrix<float>(kProblem.m, kProblem.k, 1);
  return m;
}

const Matrix<float>& rhs() {
  static const auto m = random_matrix<float>(kProblem.k, kProblem.n, 2);
  return m;
}

void bench_reference(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(gemm_reference(kProblem, kBlocking, lhs(), rhs()));
  }
}
BENCHMARK(bench_reference);

void bench_data_parallel(benchmark::State& state) {
  const auto a = data_parallel(kProblem, kBlocking);
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(a, lhs(), rhs(), static_cast<int>(state.range(0))));
  }
}
BENCHMARK(bench_data_parallel)->Arg(1)->Arg(4)->Arg(8);

void bench_stream_k(benchmark::State& state) {
  const auto a = stream_k(kProblem, kBlocking, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute(a, lhs(), rhs(), 8));
  }
}
BENCHMARK(bench_stream_k)->Arg(8)->Arg(16)->Arg(32);

void bench_decompose(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream_k({4096, 4096, 4096}, kBlocking, state.range(0)));
  }
}
BENCHMARK(bench_decompose)->Arg(108)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
