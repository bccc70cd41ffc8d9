#include "streamk/costmodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace streamk {

index_t iters_per_cta(const TileGrid& grid, index_t g) {
  if (g < 1) throw std::invalid_argument("iters_per_cta: g must be >= 1");
  return ceil_div(grid.total_iters, g);
}

index_t fixup_peers(const TileGrid& grid, index_t g) {
  return ceil_div(grid.iters_per_tile, iters_per_cta(grid, g));
}

double predict_time(const CostParams& params, const TileGrid& grid, index_t g) {
  const index_t ipc = iters_per_cta(grid, g);
  const index_t peers = fixup_peers(grid, g);
  return params.a + (peers > 1 ? params.b : 0.0) + params.c * static_cast<double>(ipc) +
         params.d * static_cast<double>(peers - 1);
}

index_t select_grid_size(const CostParams& params, const TileGrid& grid, index_t p) {
  if (p < 1) throw std::invalid_argument("select_grid_size: p must be >= 1");
  std::vector<index_t> candidates;
  const index_t cap = std::min(p, grid.total_iters);
  for (index_t g = 1; g <= cap; ++g) candidates.push_back(g);
  candidates.push_back(std::min(grid.total_tiles, grid.total_iters));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  index_t best_g = candidates.front();
  double best_time = predict_time(params, grid, best_g);
  for (index_t g : candidates) {
    const double t = predict_time(params, grid, g);
    if (t <= best_time) {  // ties break toward larger g
      best_time = t;
      best_g = g;
    }
  }
  return best_g;
}

namespace {

constexpr int kFeatures = 4;
constexpr std::array<const char*, kFeatures> kFeatureNames = {
    "fixed per-CTA cost (constant column)", "partial-output indicator",
    "iterations per CTA", "fixup peer count"};

std::array<double, kFeatures> features_of(const CalibrationSample& s) {
  const index_t ipc = iters_per_cta(s.grid, s.g);
  const index_t peers = fixup_peers(s.grid, s.g);
  return {1.0, peers > 1 ? 1.0 : 0.0, static_cast<double>(ipc),
          static_cast<double>(peers - 1)};
}

// Rank check via modified Gram-Schmidt over the feature columns; reports the
// first column that is (numerically) dependent on the earlier ones.
void check_design_rank(const std::vector<std::array<double, kFeatures>>& X) {
  const std::size_t n = X.size();
  std::array<std::vector<double>, kFeatures> q;
  for (int j = 0; j < kFeatures; ++j) {
    std::vector<double> col(n);
    double orig_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = X[i][static_cast<std::size_t>(j)];
      orig_norm += col[i] * col[i];
    }
    orig_norm = std::sqrt(orig_norm);
    for (int prev = 0; prev < j; ++prev) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += col[i] * q[prev][i];
      for (std::size_t i = 0; i < n; ++i) col[i] -= dot * q[prev][i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm <= 1e-9 * std::max(orig_norm, 1.0)) {
      throw CalibrationError(std::string("calibration design is rank-deficient: no "
                                         "independent variation in feature '") +
                             kFeatureNames[static_cast<std::size_t>(j)] + "'");
    }
    for (std::size_t i = 0; i < n; ++i) col[i] /= norm;
    q[j] = std::move(col);
  }
}

// Least squares restricted to the passive column set, via normal equations.
std::array<double, kFeatures> solve_subset(
    const std::vector<std::array<double, kFeatures>>& X, const std::vector<double>& y,
    const std::array<bool, kFeatures>& passive) {
  std::vector<int> cols;
  for (int j = 0; j < kFeatures; ++j)
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  const int k = static_cast<int>(cols.size());
  std::array<std::array<double, kFeatures + 1>, kFeatures> m{};
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        dot += X[i][static_cast<std::size_t>(cols[r])] * X[i][static_cast<std::size_t>(cols[c])];
      }
      m[r][c] = dot;
    }
    double rhs = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      rhs += X[i][static_cast<std::size_t>(cols[r])] * y[i];
    }
    m[r][k] = rhs;
  }
  // Gaussian elimination with partial pivoting (k <= 4).
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    std::swap(m[col], m[pivot]);
    if (std::abs(m[col][col]) < 1e-14) {
      throw CalibrationError("calibration subproblem is singular");
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= k; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, kFeatures> x{};
  for (int r = 0; r < k; ++r) {
    x[static_cast<std::size_t>(cols[r])] = m[r][k] / m[r][r];
  }
  return x;
}

}  // namespace

CostParams calibrate(const std::vector<CalibrationSample>& samples) {
  if (samples.size() < kFeatures) {
    throw CalibrationError("calibration needs at least 4 samples with distinct "
                           "(iters_per_cta, fixup_peers) feature vectors");
  }
  std::vector<std::array<double, kFeatures>> X;
  std::vector<double> y;
  X.reserve(samples.size());
  y.reserve(samples.size());
  for (const auto& s : samples) {
    X.push_back(features_of(s));
    y.push_back(s.measured_time);
  }
  check_design_rank(X);

  // Lawson-Hanson non-negative least squares (parameters are physical costs).
  std::array<double, kFeatures> x{};
  std::array<bool, kFeatures> passive{};
  const double tol = 1e-12;
  for (int outer = 0; outer < 8 * kFeatures; ++outer) {
    // Gradient of 0.5*||y - Xx||^2 with flipped sign.
    std::array<double, kFeatures> w{};
    for (std::size_t i = 0; i < X.size(); ++i) {
      double pred = 0.0;
      for (int j = 0; j < kFeatures; ++j) pred += X[i][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      const double resid = y[i] - pred;
      for (int j = 0; j < kFeatures; ++j) w[static_cast<std::size_t>(j)] += X[i][static_cast<std::size_t>(j)] * resid;
    }
    int enter = -1;
    double best = tol;
    for (int j = 0; j < kFeatures; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[static_cast<std::size_t>(j)] > best) {
        best = w[static_cast<std::size_t>(j)];
        enter = j;
      }
    }
    if (enter < 0) break;
    passive[static_cast<std::size_t>(enter)] = true;

    for (int inner = 0; inner < 8 * kFeatures; ++inner) {
      auto z = solve_subset(X, y, passive);
      bool feasible = true;
      double alpha = 1.0;
      int leave = -1;
      for (int j = 0; j < kFeatures; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (passive[ju] && z[ju] <= 0.0) {
          feasible = false;
          const double step = x[ju] / (x[ju] - z[ju]);
          if (step < alpha) {
            alpha = step;
            leave = j;
          }
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      for (int j = 0; j < kFeatures; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (passive[ju]) x[ju] += alpha * (z[ju] - x[ju]);
      }
      if (leave >= 0) {
        x[static_cast<std::size_t>(leave)] = 0.0;
        passive[static_cast<std::size_t>(leave)] = false;
      }
    }
  }

  CostParams params;
  params.a = x[0];
  params.b = x[1];
  params.c = x[2];
  params.d = x[3];
  double resid_sq = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double pred = 0.0;
    for (int j = 0; j < kFeatures; ++j) pred += X[i][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    resid_sq += (y[i] - pred) * (y[i] - pred);
  }
  params.fit_residual = std::sqrt(resid_sq);
  return params;
}

void save_params(const CostParams& params, std::ostream& out) {
  out.precision(17);
  out << "a=" << params.a << '\n'
      << "b=" << params.b << '\n'
      << "c=" << params.c << '\n'
      << "d=" << params.d << '\n'
      << "fit_residual=" << params.fit_residual << '\n';
}

CostParams load_params(std::istream& in) {
  CostParams params;
  std::string line;
  bool saw_c = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("params file: expected key=value, got: " + line);
    }
    const std::string key = line.substr(0, eq);
    const double value = std::stod(line.substr(eq + 1));
    if (key == "a") params.a = value;
    else if (key == "b") params.b = value;
    else if (key == "c") { params.c = value; saw_c = true; }
    else if (key == "d") params.d = value;
    else if (key == "fit_residual") params.fit_residual = value;
    else throw std::runtime_error("params file: unknown key: " + key);
  }
  if (!saw_c) throw std::runtime_error("params file: missing key 'c'");
  return params;
}

CostParams load_params_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  return load_params(in);
}

void save_params_file(const CostParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write params file: " + path);
  save_params(params, out);
}

}  // namespace streamk
