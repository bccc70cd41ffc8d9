#include "streamk/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "streamk/decompose.hpp"
#include "streamk/executor.hpp"
#include "streamk/matrix.hpp"
#include "streamk/simulate.hpp"

namespace streamk {

namespace {

constexpr index_t kDimCap = index_t{1} << 20;

index_t log_sample(SplitMix64& rng, index_t lo, index_t hi) {
  if (lo == hi) return lo;
  const double u = rng.next_double();
  const double v = std::exp(std::log(static_cast<double>(lo)) +
                            u * (std::log(static_cast<double>(hi)) -
                                 std::log(static_cast<double>(lo))));
  return std::clamp(static_cast<index_t>(std::llround(v)), lo, hi);
}

WorkAssignment decompose_for(Strategy strategy, const GemmProblem& problem,
                             const BlockingFactors& blocking, const SweepSpec& spec) {
  switch (strategy) {
    case Strategy::DataParallel: return data_parallel(problem, blocking);
    case Strategy::FixedSplit: return fixed_split(problem, blocking, spec.split);
    case Strategy::StreamK: return stream_k(problem, blocking, spec.p);
    case Strategy::DpOneTileSk: return hybrid(problem, blocking, spec.p, HybridVariant::DpOneTileSk);
    case Strategy::TwoTileSkDp: return hybrid(problem, blocking, spec.p, HybridVariant::TwoTileSkDp);
  }
  throw std::invalid_argument("unknown strategy");
}

template <typename T>
double measure_execute(const WorkAssignment& a, std::uint64_t seed, int threads) {
  const auto A = random_matrix<T>(a.problem.m, a.problem.k, seed);
  const auto B = random_matrix<T>(a.problem.k, a.problem.n, seed + 1);
  const auto t0 = std::chrono::steady_clock::now();
  auto C = execute(a, A, B, threads);
  const auto t1 = std::chrono::steady_clock::now();
  (void)C;
  return std::chrono::duration<double>(t1 - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void validate(const SweepSpec& spec) {
  if (spec.sample_count < 1) throw std::invalid_argument("sweep: sample_count must be >= 1");
  auto check_range = [](index_t lo, index_t hi, const char* axis) {
    if (lo < 1 || hi > kDimCap || lo > hi) {
      throw std::invalid_argument(std::string("sweep: bad range for ") + axis);
    }
  };
  check_range(spec.m_lo, spec.m_hi, "m");
  check_range(spec.n_lo, spec.n_hi, "n");
  check_range(spec.k_lo, spec.k_hi, "k");
  if (spec.p < 1) throw std::invalid_argument("sweep: p must be >= 1");
  if (spec.strategies.empty()) throw std::invalid_argument("sweep: no strategies");
}

void run_sweep(const SweepSpec& spec, const BlockingFactors& blocking, std::ostream& out) {
  validate(spec);
  out << "# schema=1\n";
  out << "m,n,k,t,iters_per_tile,strategy,g,utilization,makespan,measured_time\n";
  SplitMix64 rng(spec.seed);
  for (index_t sample = 0; sample < spec.sample_count; ++sample) {
    GemmProblem problem;
    problem.m = log_sample(rng, spec.m_lo, spec.m_hi);
    problem.n = log_sample(rng, spec.n_lo, spec.n_hi);
    problem.k = log_sample(rng, spec.k_lo, spec.k_hi);
    problem.dtype = spec.dtype;
    const std::uint64_t matrix_seed = rng.next();
    for (Strategy strategy : spec.strategies) {
      const WorkAssignment a = decompose_for(strategy, problem, blocking, spec);
      const Timeline timeline = simulate(a, spec.p);
      double measured = -1.0;
      if (spec.measure) {
        switch (spec.dtype) {
          case DType::Int64:
            measured = measure_execute<std::int64_t>(a, matrix_seed, spec.threads);
            break;
          case DType::Float32:
            measured = measure_execute<float>(a, matrix_seed, spec.threads);
            break;
          case DType::Float64:
            measured = measure_execute<double>(a, matrix_seed, spec.threads);
            break;
        }
      }
      out << problem.m << ',' << problem.n << ',' << problem.k << ','
          << a.grid.total_tiles << ',' << a.grid.iters_per_tile << ','
          << strategy_name(strategy) << ',' << a.grid_size << ','
          << fmt(utilization(timeline)) << ',' << fmt(timeline.makespan) << ',';
      if (spec.measure) out << fmt(measured);
      out << '\n';
    }
  }
}

}  // namespace streamk
