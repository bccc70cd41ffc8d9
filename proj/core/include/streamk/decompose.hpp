#pragma once

#include <vector>

#include "streamk/types.hpp"

namespace streamk {

enum class HybridVariant { DpOneTileSk, TwoTileSkDp };

/// One CTA per output tile; each range is exactly one whole tile.
WorkAssignment data_parallel(const GemmProblem& problem, const BlockingFactors& blocking);

/// s CTAs per output tile, each covering a contiguous chunk of
/// ceil(iters_per_tile / s) k-iterations (last chunk clamped). s=1 behaves
/// identically to data_parallel.
WorkAssignment fixed_split(const GemmProblem& problem, const BlockingFactors& blocking,
                           index_t s);

/// Even share (within one) of the aggregate MAC-loop iterations across g CTAs,
/// mapped contiguously into the m -> n -> k linearization. The first
/// total_iters % g CTAs receive the larger share; CTAs beyond total_iters
/// receive empty ranges.
WorkAssignment stream_k(const GemmProblem& problem, const BlockingFactors& blocking,
                        index_t g);

/// Hybrid schedules: full data-parallel waves plus a Stream-K-balanced
/// remainder region of p CTAs covering the trailing tiles.
///   DpOneTileSk: floor(t/p) full waves are data-parallel; the t mod p
///     remaining tiles are Stream-K-balanced (DP CTAs emitted first).
///   TwoTileSkDp: one fewer full wave; the last t - (w-1)*p tiles are
///     Stream-K-balanced (SK CTAs emitted first).
/// When t mod p == 0 both variants reduce to data_parallel ranges.
WorkAssignment hybrid(const GemmProblem& problem, const BlockingFactors& blocking,
                      index_t p, HybridVariant variant);

/// For each tile, the ascending list of cta_ids whose ranges intersect it.
/// The lowest id in each list is the tile's owner (it ran the tile's k=0
/// iteration and writes the output tile).
std::vector<std::vector<index_t>> fixup_peers_of(const WorkAssignment& assignment);

/// t / (ceil(t/p) * p): the utilization ceiling of a one-tile-per-CTA
/// schedule with uniform tiles.
double quantization_efficiency(index_t t, index_t p);

}  // namespace streamk
