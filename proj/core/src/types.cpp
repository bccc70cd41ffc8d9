#include "streamk/types.hpp"

#include <sstream>
#include <stdexcept>

namespace streamk {

const char* dtype_name(DType dtype) {
  switch (dtype) {
    case DType::Int64: return "int64";
    case DType::Float32: return "float32";
    case DType::Float64: return "float64";
  }
  return "?";
}

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::Int64: return 8;
    case DType::Float32: return 4;
    case DType::Float64: return 8;
  }
  return 0;
}

DType parse_dtype(const std::string& name) {
  if (name == "int64") return DType::Int64;
  if (name == "float32") return DType::Float32;
  if (name == "float64") return DType::Float64;
  throw std::invalid_argument("unknown dtype: " + name);
}

void validate(const GemmProblem& problem) {
  if (problem.m < 1 || problem.n < 1 || problem.k < 1) {
    throw std::invalid_argument("GemmProblem extents must be >= 1");
  }
}

void validate(const BlockingFactors& blocking) {
  if (blocking.blk_m < 1 || blocking.blk_n < 1 || blocking.blk_k < 1) {
    throw std::invalid_argument("BlockingFactors must be >= 1");
  }
}

TileGrid tile_grid(const GemmProblem& problem, const BlockingFactors& blocking) {
  validate(problem);
  validate(blocking);
  TileGrid grid;
  grid.tiles_m = ceil_div(problem.m, blocking.blk_m);
  grid.tiles_n = ceil_div(problem.n, blocking.blk_n);
  grid.total_tiles = grid.tiles_m * grid.tiles_n;
  grid.iters_per_tile = ceil_div(problem.k, blocking.blk_k);
  grid.total_iters = grid.total_tiles * grid.iters_per_tile;
  return grid;
}

TileCoords iter_to_coords(const TileGrid& grid, index_t i) {
  if (i < 0 || i >= grid.total_iters) {
    throw std::out_of_range("iteration index out of range");
  }
  return {i / grid.iters_per_tile, i % grid.iters_per_tile};
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::DataParallel: return "data_parallel";
    case Strategy::FixedSplit: return "fixed_split";
    case Strategy::StreamK: return "stream_k";
    case Strategy::DpOneTileSk: return "dp_one_tile_sk";
    case Strategy::TwoTileSkDp: return "two_tile_sk_dp";
  }
  return "?";
}

static Strategy parse_strategy_token(const std::string& tok, index_t* split) {
  const std::string prefix = "fixed_split:";
  if (tok.rfind(prefix, 0) == 0) {
    *split = std::stoll(tok.substr(prefix.size()));
    return Strategy::FixedSplit;
  }
  if (tok == "data_parallel") return Strategy::DataParallel;
  if (tok == "stream_k") return Strategy::StreamK;
  if (tok == "dp_one_tile_sk") return Strategy::DpOneTileSk;
  if (tok == "two_tile_sk_dp") return Strategy::TwoTileSkDp;
  throw std::invalid_argument("unknown strategy token: " + tok);
}

std::string to_text(const WorkAssignment& a) {
  std::ostringstream out;
  out << a.problem.m << ' ' << a.problem.n << ' ' << a.problem.k << '\n';
  out << a.blocking.blk_m << ' ' << a.blocking.blk_n << ' ' << a.blocking.blk_k << '\n';
  out << strategy_name(a.strategy);
  if (a.strategy == Strategy::FixedSplit) out << ':' << a.split;
  out << ' ' << a.grid_size << '\n';
  for (const CtaRange& r : a.ranges) {
    out << r.cta_id << ' ' << r.iter_begin << ' ' << r.iter_end << '\n';
  }
  return out.str();
}

WorkAssignment from_text(std::istream& in) {
  WorkAssignment a;
  std::string tok;
  if (!(in >> a.problem.m >> a.problem.n >> a.problem.k)) {
    throw std::invalid_argument("assignment text: bad problem line");
  }
  if (!(in >> a.blocking.blk_m >> a.blocking.blk_n >> a.blocking.blk_k)) {
    throw std::invalid_argument("assignment text: bad blocking line");
  }
  if (!(in >> tok >> a.grid_size)) {
    throw std::invalid_argument("assignment text: bad strategy line");
  }
  a.strategy = parse_strategy_token(tok, &a.split);
  a.grid = tile_grid(a.problem, a.blocking);
  CtaRange r;
  while (in >> r.cta_id >> r.iter_begin >> r.iter_end) {
    a.ranges.push_back(r);
  }
  if (static_cast<index_t>(a.ranges.size()) != a.grid_size) {
    throw std::invalid_argument("assignment text: range count != grid size");
  }
  return a;
}

WorkAssignment from_text(const std::string& text) {
  std::istringstream in(text);
  return from_text(in);
}

}  // namespace streamk
