#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace streamk {

using index_t = std::int64_t;

enum class DType { Int64, Float32, Float64 };

const char* dtype_name(DType dtype);
std::size_t dtype_size(DType dtype);
DType parse_dtype(const std::string& name);

/// GEMM problem shape, C = alpha * A * B + beta * C (alpha=1, beta=0 default).
struct GemmProblem {
  index_t m = 1;
  index_t n = 1;
  index_t k = 1;
  double alpha = 1.0;
  double beta = 0.0;
  DType dtype = DType::Float32;
};

/// Tile extents along each axis of the computation volume.
struct BlockingFactors {
  index_t blk_m = 1;
  index_t blk_n = 1;
  index_t blk_k = 1;
};

constexpr index_t ceil_div(index_t x, index_t y) { return (x + y - 1) / y; }

/// Derived tiling of a problem: tile counts and the linearized MAC-iteration
/// domain. Tiles are linearized row-major over (tiles_m, tiles_n); global
/// iteration index follows the m -> n -> k order.
struct TileGrid {
  index_t tiles_m = 0;
  index_t tiles_n = 0;
  index_t total_tiles = 0;
  index_t iters_per_tile = 0;
  index_t total_iters = 0;
};

TileGrid tile_grid(const GemmProblem& problem, const BlockingFactors& blocking);

struct TileCoords {
  index_t tile_idx = 0;
  index_t local_iter = 0;
};

/// Decode a global iteration index into (tile index, k-iteration within tile).
/// Throws std::out_of_range for i outside [0, total_iters).
TileCoords iter_to_coords(const TileGrid& grid, index_t i);

/// Contiguous slice of the global iteration domain owned by one logical CTA.
struct CtaRange {
  index_t cta_id = 0;
  index_t iter_begin = 0;  // inclusive
  index_t iter_end = 0;    // exclusive

  index_t length() const { return iter_end - iter_begin; }
  bool empty() const { return iter_end == iter_begin; }
};

enum class Strategy { DataParallel, FixedSplit, StreamK, DpOneTileSk, TwoTileSkDp };

const char* strategy_name(Strategy s);

/// Output of every decomposition strategy: disjoint, sorted CTA ranges whose
/// union covers [0, total_iters) exactly.
struct WorkAssignment {
  Strategy strategy = Strategy::DataParallel;
  index_t grid_size = 0;
  index_t split = 1;  // meaningful for FixedSplit only
  GemmProblem problem;
  BlockingFactors blocking;
  TileGrid grid;
  std::vector<CtaRange> ranges;  // sorted by cta_id, ids contiguous from 0
};

/// Line-oriented text form: "m n k", "bm bn bk", "strategy g", then one
/// "cta_id begin end" line per range. Used for golden-file comparisons.
std::string to_text(const WorkAssignment& assignment);
WorkAssignment from_text(std::istream& in);
WorkAssignment from_text(const std::string& text);

void validate(const GemmProblem& problem);
void validate(const BlockingFactors& blocking);

}  // namespace streamk
