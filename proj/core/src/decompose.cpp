#include "streamk/decompose.hpp"

#include <algorithm>
#include <stdexcept>

namespace streamk {

namespace {

// Balanced contiguous partition of [begin, end) into count ranges whose
// lengths differ by at most one, larger shares first. Appends to `out`,
// assigning consecutive cta_ids starting at first_id.
void balanced_ranges(index_t begin, index_t end, index_t count, index_t first_id,
                     std::vector<CtaRange>& out) {
  const index_t total = end - begin;
  const index_t base = total / count;
  const index_t rem = total % count;
  index_t cursor = begin;
  for (index_t i = 0; i < count; ++i) {
    const index_t len = base + (i < rem ? 1 : 0);
    out.push_back({first_id + i, cursor, cursor + len});
    cursor += len;
  }
}

WorkAssignment make_assignment(Strategy strategy, const GemmProblem& problem,
                               const BlockingFactors& blocking) {
  WorkAssignment a;
  a.strategy = strategy;
  a.problem = problem;
  a.blocking = blocking;
  a.grid = tile_grid(problem, blocking);
  return a;
}

}  // namespace

WorkAssignment data_parallel(const GemmProblem& problem, const BlockingFactors& blocking) {
  WorkAssignment a = make_assignment(Strategy::DataParallel, problem, blocking);
  const index_t t = a.grid.total_tiles;
  const index_t ipt = a.grid.iters_per_tile;
  a.grid_size = t;
  a.ranges.reserve(t);
  for (index_t x = 0; x < t; ++x) {
    a.ranges.push_back({x, x * ipt, (x + 1) * ipt});
  }
  return a;
}

WorkAssignment fixed_split(const GemmProblem& problem, const BlockingFactors& blocking,
                           index_t s) {
  if (s < 1) throw std::invalid_argument("fixed_split: s must be >= 1");
  WorkAssignment a = make_assignment(Strategy::FixedSplit, problem, blocking);
  a.split = s;
  const index_t t = a.grid.total_tiles;
  const index_t ipt = a.grid.iters_per_tile;
  const index_t iters_per_split = ceil_div(ipt, s);
  a.grid_size = t * s;
  a.ranges.reserve(a.grid_size);
  for (index_t x = 0; x < t; ++x) {
    const index_t tile_begin = x * ipt;
    for (index_t y = 0; y < s; ++y) {
      const index_t lo = std::min(ipt, y * iters_per_split);
      const index_t hi = std::min(ipt, lo + iters_per_split);
      a.ranges.push_back({x * s + y, tile_begin + lo, tile_begin + hi});
    }
  }
  return a;
}

WorkAssignment stream_k(const GemmProblem& problem, const BlockingFactors& blocking,
                        index_t g) {
  if (g < 1) throw std::invalid_argument("stream_k: g must be >= 1");
  WorkAssignment a = make_assignment(Strategy::StreamK, problem, blocking);
  a.grid_size = g;
  a.ranges.reserve(g);
  balanced_ranges(0, a.grid.total_iters, g, 0, a.ranges);
  return a;
}

WorkAssignment hybrid(const GemmProblem& problem, const BlockingFactors& blocking,
                      index_t p, HybridVariant variant) {
  if (p < 1) throw std::invalid_argument("hybrid: p must be >= 1");
  const Strategy tag = variant == HybridVariant::DpOneTileSk ? Strategy::DpOneTileSk
                                                             : Strategy::TwoTileSkDp;
  WorkAssignment a = make_assignment(tag, problem, blocking);
  const index_t t = a.grid.total_tiles;
  const index_t ipt = a.grid.iters_per_tile;
  const index_t w = t / p;
  const index_t r = t % p;

  if (r == 0) {
    // No partial wave: both variants degenerate to data-parallel ranges.
    a.grid_size = t;
    for (index_t x = 0; x < t; ++x) a.ranges.push_back({x, x * ipt, (x + 1) * ipt});
    return a;
  }

  index_t dp_tiles;
  if (variant == HybridVariant::DpOneTileSk) {
    dp_tiles = w * p;  // SK region is the final partial wave
  } else {
    dp_tiles = w >= 2 ? (w - 1) * p : 0;  // SK region spans p..2p-1 tiles
  }
  const index_t sk_begin = dp_tiles * ipt;
  a.grid_size = dp_tiles + p;
  a.ranges.reserve(a.grid_size);

  if (variant == HybridVariant::DpOneTileSk) {
    // DP tiles first, SK remainder last.
    for (index_t x = 0; x < dp_tiles; ++x) a.ranges.push_back({x, x * ipt, (x + 1) * ipt});
    balanced_ranges(sk_begin, a.grid.total_iters, p, dp_tiles, a.ranges);
  } else {
    // SK CTAs are emitted first; they cover the trailing tiles' iterations.
    balanced_ranges(sk_begin, a.grid.total_iters, p, 0, a.ranges);
    for (index_t x = 0; x < dp_tiles; ++x) {
      a.ranges.push_back({p + x, x * ipt, (x + 1) * ipt});
    }
  }
  return a;
}

std::vector<std::vector<index_t>> fixup_peers_of(const WorkAssignment& a) {
  std::vector<std::vector<index_t>> peers(a.grid.total_tiles);
  const index_t ipt = a.grid.iters_per_tile;
  for (const CtaRange& r : a.ranges) {
    if (r.empty()) continue;
    const index_t first_tile = r.iter_begin / ipt;
    const index_t last_tile = (r.iter_end - 1) / ipt;
    for (index_t tile = first_tile; tile <= last_tile; ++tile) {
      peers[tile].push_back(r.cta_id);
    }
  }
  for (auto& list : peers) std::sort(list.begin(), list.end());
  return peers;
}

double quantization_efficiency(index_t t, index_t p) {
  if (t < 1 || p < 1) throw std::invalid_argument("quantization_efficiency: t, p >= 1");
  return static_cast<double>(t) / static_cast<double>(ceil_div(t, p) * p);
}

}  // namespace streamk
