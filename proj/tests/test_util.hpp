#pragma once

// Shared test helpers: the naive triple-loop oracle (independent of every
// library code path) and randomized instance generators.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "streamk/matrix.hpp"
#include "streamk/types.hpp"

namespace streamk::testutil {

// Independent oracle: plain i-j-k triple loop, no blocking, no tiling.
template <typename T>
Matrix<T> naive_multiply(const Matrix<T>& A, const Matrix<T>& B) {
  Matrix<T> C(A.rows, B.cols);
  for (index_t i = 0; i < A.rows; ++i) {
    for (index_t j = 0; j < B.cols; ++j) {
      T acc(0);
      for (index_t kk = 0; kk < A.cols; ++kk) acc += A.at(i, kk) * B.at(kk, j);
      C.at(i, j) = acc;
    }
  }
  return C;
}

struct Rng {
  SplitMix64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  // Uniform in [lo, hi].
  index_t uniform(index_t lo, index_t hi) {
    return lo + static_cast<index_t>(gen.next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
};

inline GemmProblem random_problem(Rng& rng, index_t dim_max) {
  GemmProblem p;
  p.m = rng.uniform(1, dim_max);
  p.n = rng.uniform(1, dim_max);
  p.k = rng.uniform(1, dim_max);
  return p;
}

inline BlockingFactors random_blocking(Rng& rng, index_t blk_max) {
  return {rng.uniform(1, blk_max), rng.uniform(1, blk_max), rng.uniform(1, blk_max)};
}

// Coverage/disjointness: sorted by iter_begin, the nonempty ranges must tile
// [0, total_iters) exactly.
inline bool covers_exactly(const WorkAssignment& a) {
  std::vector<CtaRange> sorted;
  for (const CtaRange& r : a.ranges) {
    if (r.iter_begin > r.iter_end) return false;
    if (!r.empty()) sorted.push_back(r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const CtaRange& x, const CtaRange& y) { return x.iter_begin < y.iter_begin; });
  index_t cursor = 0;
  for (const CtaRange& r : sorted) {
    if (r.iter_begin != cursor) return false;
    cursor = r.iter_end;
  }
  return cursor == a.grid.total_iters;
}

}  // namespace streamk::testutil
