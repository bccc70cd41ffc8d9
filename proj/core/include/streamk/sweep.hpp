#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "streamk/types.hpp"

namespace streamk {

/// Corpus sweep configuration. Dimensions are log-sampled: exp of uniform
/// over [ln lo, ln hi], rounded to nearest integer.
struct SweepSpec {
  index_t m_lo = 128, m_hi = 2048;
  index_t n_lo = 128, n_hi = 2048;
  index_t k_lo = 128, k_hi = 2048;
  index_t sample_count = 200;
  std::uint64_t seed = 0;
  std::vector<Strategy> strategies = {Strategy::DataParallel, Strategy::StreamK};
  DType dtype = DType::Float32;
  index_t p = 8;          // simulated core count; also Stream-K / hybrid grid knob
  index_t split = 2;      // fixed-split factor
  bool measure = false;   // additionally run the executor and record wall time
  int threads = 1;        // executor threads when measuring
};

void validate(const SweepSpec& spec);

/// Runs simulate (and optionally execute) per sampled problem and strategy.
/// Writes a versioned CSV: header line "# schema=1" then
/// m,n,k,t,iters_per_tile,strategy,g,utilization,makespan,measured_time.
/// Deterministic for a fixed seed except the measured_time column.
void run_sweep(const SweepSpec& spec, const BlockingFactors& blocking, std::ostream& out);

}  // namespace streamk
