#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamk/types.hpp"

namespace streamk {

/// Workload constants of the analytical CTA runtime model:
///   a: fixed per-CTA cost, b: conditional partial-output cost,
///   c: per-MAC-iteration cost, d: per-collaborator reduction cost.
struct CostParams {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 0.0;
  double fit_residual = 0.0;
};

index_t iters_per_cta(const TileGrid& grid, index_t g);

/// ceil(iters_per_tile / iters_per_cta(g)): the modeled number of CTAs
/// covering each tile. An estimate; the true per-tile peer count can differ
/// by one due to tile-boundary misalignment.
index_t fixup_peers(const TileGrid& grid, index_t g);

/// time_CTA(g) = a + b*[FixupPeers(g) > 1] + c*ItersPerCta(g)
///            + d*(FixupPeers(g) - 1)
double predict_time(const CostParams& params, const TileGrid& grid, index_t g);

/// argmin of predict_time over g in {1..p} union {t}, clamped to total_iters;
/// ties break toward larger g.
index_t select_grid_size(const CostParams& params, const TileGrid& grid, index_t p);

struct CalibrationSample {
  TileGrid grid;
  index_t g = 1;
  double measured_time = 0.0;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-negative least-squares fit of {a, b, c, d} over the feature matrix
/// [1, 1{peers>1}, iters_per_cta, peers-1]. Requires >= 4 samples with
/// independent feature variation; throws CalibrationError naming the missing
/// variation otherwise. fit_residual holds the l2 residual norm.
CostParams calibrate(const std::vector<CalibrationSample>& samples);

/// Human-readable key-value persistence: a=, b=, c=, d=, fit_residual=.
void save_params(const CostParams& params, std::ostream& out);
CostParams load_params(std::istream& in);
CostParams load_params_file(const std::string& path);
void save_params_file(const CostParams& params, const std::string& path);

}  // namespace streamk
