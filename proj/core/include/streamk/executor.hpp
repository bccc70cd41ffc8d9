#pragma once

#include <atomic>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "streamk/decompose.hpp"
#include "streamk/matrix.hpp"
#include "streamk/types.hpp"

namespace streamk {

/// Sequential cache-blocked GEMM: the six-loop blocked order with the output
/// tile zero-initialized before its BLK_K-stepped accumulation. Oracle for
/// every parallel path.
template <typename T>
Matrix<T> gemm_reference(const GemmProblem& problem, const BlockingFactors& blocking,
                         const Matrix<T>& A, const Matrix<T>& B) {
  validate(problem);
  validate(blocking);
  if (A.rows != problem.m || A.cols != problem.k || B.rows != problem.k ||
      B.cols != problem.n) {
    throw std::invalid_argument("gemm_reference: matrix shapes do not match problem");
  }
  const index_t m = problem.m, n = problem.n, k = problem.k;
  Matrix<T> C(m, n);
  for (index_t mm = 0; mm < m; mm += blocking.blk_m) {
    const index_t m_hi = std::min(mm + blocking.blk_m, m);
    for (index_t nn = 0; nn < n; nn += blocking.blk_n) {
      const index_t n_hi = std::min(nn + blocking.blk_n, n);
      for (index_t mmm = mm; mmm < m_hi; ++mmm)
        for (index_t nnn = nn; nnn < n_hi; ++nnn) C.at(mmm, nnn) = T(0);
      for (index_t kk = 0; kk < k; kk += blocking.blk_k) {
        const index_t k_hi = std::min(kk + blocking.blk_k, k);
        for (index_t mmm = mm; mmm < m_hi; ++mmm) {
          for (index_t nnn = nn; nnn < n_hi; ++nnn) {
            T acc = C.at(mmm, nnn);
            for (index_t kkk = kk; kkk < k_hi; ++kkk) {
              acc += A.at(mmm, kkk) * B.at(kkk, nnn);
            }
            C.at(mmm, nnn) = acc;
          }
        }
      }
    }
  }
  return C;
}

/// Thread-local tile accumulator for a contiguous range of a tile's
/// k-iterations. Zero-initialized; reads outside the matrices contribute
/// zeros (ragged edges).
template <typename T>
std::vector<T> mac_loop(index_t tile_idx, index_t iter_begin, index_t iter_end,
                        const Matrix<T>& A, const Matrix<T>& B,
                        const BlockingFactors& blocking, const TileGrid& grid) {
  if (tile_idx < 0 || tile_idx >= grid.total_tiles) {
    throw std::invalid_argument("mac_loop: tile_idx out of range");
  }
  if (iter_begin < 0 || iter_begin > iter_end || iter_end > grid.iters_per_tile) {
    throw std::invalid_argument("mac_loop: bad iteration range");
  }
  const index_t mm = blocking.blk_m * (tile_idx / grid.tiles_n);
  const index_t nn = blocking.blk_n * (tile_idx % grid.tiles_n);
  const index_t m_ext = std::min(blocking.blk_m, A.rows - mm);
  const index_t n_ext = std::min(blocking.blk_n, B.cols - nn);
  std::vector<T> accum(static_cast<std::size_t>(blocking.blk_m * blocking.blk_n), T(0));
  for (index_t iter = iter_begin; iter < iter_end; ++iter) {
    const index_t kk = iter * blocking.blk_k;
    const index_t k_hi = std::min(kk + blocking.blk_k, A.cols);
    for (index_t i = 0; i < m_ext; ++i) {
      for (index_t j = 0; j < n_ext; ++j) {
        T acc = accum[static_cast<std::size_t>(i * blocking.blk_n + j)];
        for (index_t kkk = kk; kkk < k_hi; ++kkk) {
          acc += A.at(mm + i, kkk) * B.at(kkk, nn + j);
        }
        accum[static_cast<std::size_t>(i * blocking.blk_n + j)] = acc;
      }
    }
  }
  return accum;
}

namespace detail {

/// Per-CTA partial-sum slabs plus write-once completion flags. Storage scales
/// with the grid size g, not the problem size; basic Stream-K emits at most
/// one leading partial per CTA.
template <typename T>
struct FixupStore {
  std::vector<std::vector<T>> partials;
  std::unique_ptr<std::atomic<std::uint32_t>[]> flags;

  explicit FixupStore(index_t g)
      : partials(static_cast<std::size_t>(g)),
        flags(new std::atomic<std::uint32_t>[static_cast<std::size_t>(g)]) {
    for (index_t i = 0; i < g; ++i) flags[i].store(0, std::memory_order_relaxed);
  }

  // Release store: all partials writes are visible to an acquire reader of
  // the flag. Returns false on a double signal (protocol bug).
  bool signal(index_t cta) {
    const bool first = flags[cta].exchange(1, std::memory_order_release) == 0;
    flags[cta].notify_all();
    return first;
  }

  void wait(index_t cta) const {
    while (flags[cta].load(std::memory_order_acquire) == 0) {
      flags[cta].wait(0, std::memory_order_acquire);
    }
  }
};

}  // namespace detail

/// Run a WorkAssignment with a pool of `thread_count` worker threads.
/// Protocol per CTA and tile segment: a CTA whose segment does not start the
/// tile stores its accumulator and signals; the tile-starting CTA waits on
/// each covering peer, reduces their partials in ascending cta_id order, and
/// writes the output tile. CTAs are dispatched in descending cta_id order;
/// every dependency points from a lower id (owner) to higher ids (signalers),
/// so this is deadlock-free for any thread_count >= 1.
template <typename T>
Matrix<T> execute(const WorkAssignment& assignment, const Matrix<T>& A, const Matrix<T>& B,
                  int thread_count) {
  const GemmProblem& problem = assignment.problem;
  const BlockingFactors& blocking = assignment.blocking;
  const TileGrid& grid = assignment.grid;
  if (A.rows != problem.m || A.cols != problem.k || B.rows != problem.k ||
      B.cols != problem.n) {
    throw std::invalid_argument("execute: matrix shapes do not match assignment");
  }
  if (thread_count < 1) throw std::invalid_argument("execute: thread_count must be >= 1");

  Matrix<T> C(problem.m, problem.n);
  const auto peers = fixup_peers_of(assignment);
  const index_t g = assignment.grid_size;
  detail::FixupStore<T> store(g);
  std::atomic<index_t> next{0};
  std::atomic<bool> protocol_error{false};

  auto run_cta = [&](index_t cta) {
    const CtaRange& range = assignment.ranges[static_cast<std::size_t>(cta)];
    index_t iter = range.iter_begin;
    while (iter < range.iter_end) {
      const index_t tile_idx = iter / grid.iters_per_tile;
      const index_t tile_iter = tile_idx * grid.iters_per_tile;
      const index_t tile_iter_end = tile_iter + grid.iters_per_tile;
      const index_t local_begin = iter - tile_iter;
      const index_t local_end = std::min(range.iter_end, tile_iter_end) - tile_iter;
      std::vector<T> accum =
          mac_loop(tile_idx, local_begin, local_end, A, B, blocking, grid);
      if (local_begin != 0) {
        // Not the tile starter: hand the partial to the owner.
        store.partials[static_cast<std::size_t>(cta)] = std::move(accum);
        if (!store.signal(cta)) protocol_error.store(true);
      } else {
        // Tile owner: fold in peers (all have strictly higher cta_ids),
        // ascending order fixes the reduction order.
        for (index_t peer : peers[static_cast<std::size_t>(tile_idx)]) {
          if (peer == cta) continue;
          store.wait(peer);
          const std::vector<T>& p = store.partials[static_cast<std::size_t>(peer)];
          for (std::size_t e = 0; e < accum.size(); ++e) accum[e] += p[e];
        }
        const index_t mm = blocking.blk_m * (tile_idx / grid.tiles_n);
        const index_t nn = blocking.blk_n * (tile_idx % grid.tiles_n);
        const index_t m_ext = std::min(blocking.blk_m, problem.m - mm);
        const index_t n_ext = std::min(blocking.blk_n, problem.n - nn);
        for (index_t i = 0; i < m_ext; ++i) {
          for (index_t j = 0; j < n_ext; ++j) {
            C.at(mm + i, nn + j) = accum[static_cast<std::size_t>(i * blocking.blk_n + j)];
          }
        }
      }
      iter = tile_iter_end;
    }
  };

  auto worker = [&] {
    for (;;) {
      const index_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= g) return;
      run_cta(g - 1 - i);
    }
  };

  if (thread_count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (protocol_error.load()) {
    throw std::logic_error("execute: fixup flag signaled twice");
  }
  return C;
}

struct VerifyReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  bool pass = false;
};

/// int64: pass iff bit-exact. float: pass iff per-element
/// |c - ref| <= 8 * eps * k * max(|ref|, 1).
template <typename T>
VerifyReport verify(const Matrix<T>& C, const Matrix<T>& C_ref, index_t k) {
  if (C.rows != C_ref.rows || C.cols != C_ref.cols) {
    throw std::invalid_argument("verify: shape mismatch");
  }
  VerifyReport report;
  report.pass = true;
  for (std::size_t i = 0; i < C.data.size(); ++i) {
    const double c = static_cast<double>(C.data[i]);
    const double ref = static_cast<double>(C_ref.data[i]);
    const double abs_err = std::abs(c - ref);
    const double scale = std::max(std::abs(ref), 1.0);
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    report.max_rel_err = std::max(report.max_rel_err, abs_err / scale);
    if constexpr (std::is_same_v<T, std::int64_t>) {
      if (C.data[i] != C_ref.data[i]) report.pass = false;
    } else {
      const double eps = static_cast<double>(std::numeric_limits<T>::epsilon());
      if (abs_err > 8.0 * eps * static_cast<double>(k) * scale) report.pass = false;
    }
  }
  return report;
}

/// Tolerance bound used by verify, exposed for reporting.
template <typename T>
double verify_bound(index_t k) {
  return 8.0 * static_cast<double>(std::numeric_limits<T>::epsilon()) *
         static_cast<double>(k);
}

}  // namespace streamk
