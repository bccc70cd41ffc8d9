// streamk: command-line front end for the work-decomposition lab.
// Subcommands: schedule | run | sweep | model | calibrate.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "streamk/costmodel.hpp"
#include "streamk/decompose.hpp"
#include "streamk/executor.hpp"
#include "streamk/matrix.hpp"
#include "streamk/simulate.hpp"
#include "streamk/sweep.hpp"
#include "streamk/types.hpp"

namespace {

using namespace streamk;

BlockingFactors parse_blk(const std::string& text) {
  BlockingFactors blk;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> blk.blk_m >> x1 >> blk.blk_n >> x2 >> blk.blk_k) || x1 != 'x' || x2 != 'x') {
    throw CLI::ValidationError("--blk", "expected BLKMxBLKNxBLKK, e.g. 128x128x32");
  }
  return blk;
}

Strategy parse_strategy(const std::string& name) {
  if (name == "dp") return Strategy::DataParallel;
  if (name == "split") return Strategy::FixedSplit;
  if (name == "streamk") return Strategy::StreamK;
  if (name == "dp-one-tile-sk") return Strategy::DpOneTileSk;
  if (name == "two-tile-sk-dp") return Strategy::TwoTileSkDp;
  throw CLI::ValidationError(
      "--strategy", "expected one of dp|split|streamk|dp-one-tile-sk|two-tile-sk-dp");
}

int default_threads() {
  if (const char* env = std::getenv("STREAMK_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

WorkAssignment build_assignment(Strategy strategy, const GemmProblem& problem,
                                const BlockingFactors& blk, index_t s, index_t g,
                                index_t p) {
  switch (strategy) {
    case Strategy::DataParallel: return data_parallel(problem, blk);
    case Strategy::FixedSplit: return fixed_split(problem, blk, s);
    case Strategy::StreamK: return stream_k(problem, blk, g);
    case Strategy::DpOneTileSk: return hybrid(problem, blk, p, HybridVariant::DpOneTileSk);
    case Strategy::TwoTileSkDp: return hybrid(problem, blk, p, HybridVariant::TwoTileSkDp);
  }
  throw std::logic_error("unreachable");
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

void print_schedule_summary(const WorkAssignment& a, index_t p) {
  const TileGrid& grid = a.grid;
  std::cout << "tiles " << grid.tiles_m << "x" << grid.tiles_n << " = " << grid.total_tiles
            << ", " << grid.iters_per_tile << " iters/tile, " << grid.total_iters
            << " total iters\n";
  std::cout << "strategy " << strategy_name(a.strategy);
  if (a.strategy == Strategy::FixedSplit) std::cout << " s=" << a.split;
  std::cout << ", grid size " << a.grid_size << "\n";

  index_t min_len = grid.total_iters, max_len = 0;
  for (const CtaRange& r : a.ranges) {
    if (r.empty()) continue;
    min_len = std::min(min_len, r.length());
    max_len = std::max(max_len, r.length());
  }
  if (max_len == 0) min_len = 0;
  if (min_len == max_len) {
    std::cout << max_len << " iters/CTA\n";
  } else {
    std::cout << min_len << "/" << max_len << " iters/CTA\n";
  }

  const auto peers = fixup_peers_of(a);
  index_t shared_tiles = 0, max_peers = 0, partial_stores = 0;
  for (const auto& list : peers) {
    const auto count = static_cast<index_t>(list.size());
    if (count > 1) ++shared_tiles;
    max_peers = std::max(max_peers, count);
    partial_stores += count - 1;
  }
  std::cout << "fixup: " << shared_tiles << " shared tiles, max " << max_peers
            << " peers, " << partial_stores << " partial stores\n";
  std::cout << "skew: " << tile_processing_skew(a) << " distinct starting k-offsets\n";
  std::cout << "quantization efficiency "
            << fmtg(quantization_efficiency(grid.total_tiles, p)) << "\n";

  const Timeline timeline = simulate(a, p);
  std::cout << "makespan " << fmtg(timeline.makespan) << " (unit cost, p=" << p << ")\n";
  std::cout << "utilization " << fmtg(utilization(timeline)) << "\n";
}

template <typename T>
int run_and_verify(const WorkAssignment& a, std::uint64_t seed, int threads, bool corrupt) {
  const auto A = random_matrix<T>(a.problem.m, a.problem.k, seed);
  const auto B = random_matrix<T>(a.problem.k, a.problem.n, seed + 1);

  const auto t0 = std::chrono::steady_clock::now();
  const auto C_ref = gemm_reference(a.problem, a.blocking, A, B);
  const auto t1 = std::chrono::steady_clock::now();
  auto C = execute(a, A, B, threads);
  const auto t2 = std::chrono::steady_clock::now();

  if (corrupt && !C.data.empty()) C.data[0] += T(1);  // negative-test hook

  const VerifyReport report = verify(C, C_ref, a.problem.k);
  std::printf("reference %.3fs, execute %.3fs (%d threads)\n",
              std::chrono::duration<double>(t1 - t0).count(),
              std::chrono::duration<double>(t2 - t1).count(), threads);
  if constexpr (std::is_same_v<T, std::int64_t>) {
    if (report.pass) {
      std::printf("PASS exact\n");
    } else {
      std::printf("FAIL int64 mismatch, max_abs_err %g\n", report.max_abs_err);
    }
  } else {
    const double bound = verify_bound<T>(a.problem.k);
    if (report.pass) {
      std::printf("PASS max_rel_err %g <= bound %g\n", report.max_rel_err, bound);
    } else {
      std::printf("FAIL max_rel_err %g > bound %g (max_abs_err %g)\n", report.max_rel_err,
                  bound, report.max_abs_err);
    }
  }
  return report.pass ? 0 : 1;
}

// Microbenchmark shapes for calibration: three regimes (square, deep-k,
// wide) so iters_per_cta and fixup_peers both vary across samples.
struct BenchShape {
  GemmProblem problem;
  std::vector<index_t> grid_sizes;
};

std::vector<CalibrationSample> run_microbenchmarks(const std::vector<BenchShape>& shapes,
                                                   const BlockingFactors& blk, int threads) {
  std::vector<CalibrationSample> samples;
  for (const auto& shape : shapes) {
    const auto A = random_matrix<float>(shape.problem.m, shape.problem.k, 1);
    const auto B = random_matrix<float>(shape.problem.k, shape.problem.n, 2);
    for (index_t g : shape.grid_sizes) {
      const WorkAssignment a = stream_k(shape.problem, blk, g);
      double best = 1e300;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        auto C = execute(a, A, B, threads);
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
        (void)C;
      }
      samples.push_back({a.grid, g, best * 1e6});  // microseconds
    }
  }
  return samples;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream-K work-decomposition lab"};
  app.require_subcommand(1);

  // Shared flag storage.
  index_t m = 0, n = 0, k = 0;
  std::string blk_text = "128x128x32";
  std::string strategy_text = "dp";
  index_t s = 2, g = 0, p = 4;
  std::string dtype_text = "float32";
  std::uint64_t seed = 42;
  int threads = default_threads();
  std::string svg_path, out_path, params_path;
  bool dump = false, corrupt = false;

  auto add_problem_flags = [&](CLI::App* cmd) {
    cmd->add_option("--m", m, "rows of A/C")->required();
    cmd->add_option("--n", n, "cols of B/C")->required();
    cmd->add_option("--k", k, "accumulation depth")->required();
    cmd->add_option("--blk", blk_text, "blocking factors BLKMxBLKNxBLKK")
        ->capture_default_str();
  };
  auto add_strategy_flags = [&](CLI::App* cmd) {
    cmd->add_option("--strategy", strategy_text,
                    "dp|split|streamk|dp-one-tile-sk|two-tile-sk-dp")
        ->capture_default_str();
    cmd->add_option("--s", s, "splitting factor (split strategy)")->capture_default_str();
    cmd->add_option("--g", g, "grid size (streamk strategy; default p)");
    cmd->add_option("--p", p, "processor core count")->capture_default_str();
  };

  auto* schedule = app.add_subcommand("schedule", "decompose and inspect a schedule");
  add_problem_flags(schedule);
  add_strategy_flags(schedule);
  schedule->add_option("--svg", svg_path, "write a Gantt chart SVG");
  schedule->add_flag("--dump", dump, "print the assignment text form");

  auto* run = app.add_subcommand("run", "execute a schedule and verify against reference");
  add_problem_flags(run);
  add_strategy_flags(run);
  run->add_option("--dtype", dtype_text, "int64|float32|float64")->capture_default_str();
  run->add_option("--seed", seed, "matrix generation seed")->capture_default_str();
  run->add_option("--threads", threads, "worker threads")->capture_default_str();
  run->add_flag("--corrupt", corrupt)->group("");  // hidden: forces verification failure

  auto* sweep_cmd = app.add_subcommand("sweep", "log-sampled corpus sweep to CSV");
  SweepSpec spec;
  bool paper_scale = false;
  std::string strategies_text = "dp,streamk";
  sweep_cmd->add_option("--samples", spec.sample_count, "problems to sample")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", spec.seed, "sampling seed")->capture_default_str();
  sweep_cmd->add_option("--m-range", [&spec](const std::vector<std::string>& v) {
    return std::sscanf(v[0].c_str(), "%ld:%ld", &spec.m_lo, &spec.m_hi) == 2;
  }, "m range lo:hi");
  sweep_cmd->add_option("--n-range", [&spec](const std::vector<std::string>& v) {
    return std::sscanf(v[0].c_str(), "%ld:%ld", &spec.n_lo, &spec.n_hi) == 2;
  }, "n range lo:hi");
  sweep_cmd->add_option("--k-range", [&spec](const std::vector<std::string>& v) {
    return std::sscanf(v[0].c_str(), "%ld:%ld", &spec.k_lo, &spec.k_hi) == 2;
  }, "k range lo:hi");
  sweep_cmd->add_flag("--paper-scale", paper_scale, "use the 128..8192 corpus ranges");
  sweep_cmd->add_option("--strategies", strategies_text, "comma list of strategies")
      ->capture_default_str();
  sweep_cmd->add_option("--p", spec.p, "simulated core count")->capture_default_str();
  sweep_cmd->add_option("--split", spec.split, "fixed-split factor")->capture_default_str();
  sweep_cmd->add_option("--dtype", dtype_text, "dtype for --execute")->capture_default_str();
  sweep_cmd->add_flag("--execute", spec.measure, "also run the executor per row");
  sweep_cmd->add_option("--threads", spec.threads, "executor threads for --execute");
  sweep_cmd->add_option("--blk", blk_text, "blocking factors")->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* model = app.add_subcommand("model", "evaluate the analytical runtime model per g");
  add_problem_flags(model);
  model->add_option("--params", params_path, "cost params file (default unit costs)");
  model->add_option("--p", p, "processor core count")->capture_default_str();
  model->add_option("--svg", svg_path, "write the time_CTA(g) curve as SVG");

  auto* cal = app.add_subcommand("calibrate", "fit cost params from microbenchmarks");
  std::string synthetic_text, shape_text, glist_text;
  cal->add_option("--out", params_path, "output params file")->required();
  cal->add_option("--synthetic", synthetic_text,
                  "a,b,c,d: replay noiseless samples from planted params instead of "
                  "measuring");
  cal->add_option("--shape", shape_text, "restrict microbenchmarks to MxNxK");
  cal->add_option("--g-list", glist_text, "comma list of grid sizes");
  cal->add_option("--blk", blk_text, "blocking factors")->capture_default_str();
  cal->add_option("--threads", threads, "executor threads")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const BlockingFactors blk = parse_blk(blk_text);

    if (schedule->parsed() || run->parsed()) {
      GemmProblem problem{m, n, k};
      problem.dtype = parse_dtype(dtype_text);
      const Strategy strategy = parse_strategy(strategy_text);
      if (g == 0) g = p;
      const WorkAssignment a = build_assignment(strategy, problem, blk, s, g, p);

      if (schedule->parsed()) {
        std::cout << "problem " << problem.m << "x" << problem.n << "x" << problem.k
                  << " blk " << blk.blk_m << "x" << blk.blk_n << "x" << blk.blk_k << "\n";
        print_schedule_summary(a, p);
        if (dump) std::cout << to_text(a);
        if (!svg_path.empty()) {
          render_gantt_file(simulate(a, p), svg_path);
          std::cout << "wrote " << svg_path << "\n";
        }
        return 0;
      }
      switch (problem.dtype) {
        case DType::Int64: return run_and_verify<std::int64_t>(a, seed, threads, corrupt);
        case DType::Float32: return run_and_verify<float>(a, seed, threads, corrupt);
        case DType::Float64: return run_and_verify<double>(a, seed, threads, corrupt);
      }
    }

    if (sweep_cmd->parsed()) {
      if (paper_scale) {
        spec.m_lo = spec.n_lo = spec.k_lo = 128;
        spec.m_hi = spec.n_hi = spec.k_hi = 8192;
      }
      spec.dtype = parse_dtype(dtype_text);
      spec.strategies.clear();
      std::istringstream list(strategies_text);
      std::string tok;
      while (std::getline(list, tok, ',')) spec.strategies.push_back(parse_strategy(tok));
      if (out_path.empty()) {
        run_sweep(spec, blk, std::cout);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        run_sweep(spec, blk, out);
      }
      return 0;
    }

    if (model->parsed()) {
      GemmProblem problem{m, n, k};
      const TileGrid grid = tile_grid(problem, blk);
      CostParams params;
      if (!params_path.empty()) params = load_params_file(params_path);
      const index_t g_best = select_grid_size(params, grid, p);
      std::printf("%6s %14s %12s %14s\n", "g", "iters_per_cta", "fixup_peers", "time");
      std::vector<std::pair<index_t, double>> curve;
      for (index_t gi = 1; gi <= std::max(p, std::min(grid.total_tiles, grid.total_iters));
           ++gi) {
        const double t = predict_time(params, grid, gi);
        curve.emplace_back(gi, t);
        std::printf("%6ld %14ld %12ld %14g%s\n", gi, iters_per_cta(grid, gi),
                    fixup_peers(grid, gi), t, gi == g_best ? "  *" : "");
      }
      std::printf("g_best %ld\n", g_best);
      if (!svg_path.empty()) {
        // Simple polyline of time_CTA(g).
        std::ofstream out(svg_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + svg_path);
        double tmax = 0;
        for (auto& [gi, t] : curve) tmax = std::max(tmax, t);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
               "height=\"360\">\n  <polyline fill=\"none\" stroke=\"#4e79a7\" "
               "stroke-width=\"2\" points=\"";
        for (auto& [gi, t] : curve) {
          const double x = 40.0 + 560.0 * static_cast<double>(gi - 1) /
                                      static_cast<double>(std::max<index_t>(1, curve.size() - 1));
          const double y = 320.0 - 280.0 * t / tmax;
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
          out << buf;
        }
        out << "\"/>\n</svg>\n";
        std::cout << "wrote " << svg_path << "\n";
      }
      return 0;
    }

    if (cal->parsed()) {
      std::vector<BenchShape> shapes;
      std::vector<index_t> grid_sizes = {1, 2, 4, 8, 16, 32};
      if (!glist_text.empty()) {
        grid_sizes.clear();
        std::istringstream list(glist_text);
        std::string tok;
        while (std::getline(list, tok, ',')) grid_sizes.push_back(std::stoll(tok));
      }
      if (!shape_text.empty()) {
        GemmProblem problem;
        char x1, x2;
        std::istringstream in(shape_text);
        if (!(in >> problem.m >> x1 >> problem.n >> x2 >> problem.k)) {
          throw std::runtime_error("--shape: expected MxNxK");
        }
        shapes.push_back({problem, grid_sizes});
      } else {
        shapes.push_back({GemmProblem{256, 256, 2048}, grid_sizes});
        shapes.push_back({GemmProblem{512, 512, 256}, grid_sizes});
        shapes.push_back({GemmProblem{128, 128, 4096}, grid_sizes});
      }

      std::vector<CalibrationSample> samples;
      if (!synthetic_text.empty()) {
        CostParams planted;
        if (std::sscanf(synthetic_text.c_str(), "%lf,%lf,%lf,%lf", &planted.a, &planted.b,
                        &planted.c, &planted.d) != 4) {
          throw std::runtime_error("--synthetic: expected a,b,c,d");
        }
        for (const auto& shape : shapes) {
          for (index_t gi : shape.grid_sizes) {
            const TileGrid grid = tile_grid(shape.problem, blk);
            samples.push_back({grid, gi, predict_time(planted, grid, gi)});
          }
        }
      } else {
        samples = run_microbenchmarks(shapes, blk, threads);
      }
      const CostParams fitted = calibrate(samples);
      save_params_file(fitted, params_path);
      std::printf("a=%g b=%g c=%g d=%g fit_residual=%g\n", fitted.a, fitted.b, fitted.c,
                  fitted.d, fitted.fit_residual);
      std::cout << "wrote " << params_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
