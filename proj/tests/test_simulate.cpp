#include <doctest.h>

#include <sstream>

#include "streamk/decompose.hpp"
#include "streamk/simulate.hpp"
#include "test_util.hpp"

using namespace streamk;
using namespace streamk::testutil;

TEST_CASE("simulate fixed schedules at unit cost") {
  SUBCASE("9 equal tiles over 4 cores: 3 waves, 75%") {
    const Timeline t = simulate(data_parallel({384, 384, 128}, {128, 128, 128}), 4);
    CHECK(t.makespan == 3.0);
    CHECK(utilization(t) == 0.75);
  }
  SUBCASE("fixed_split s=2, 18 CTAs: 90%") {
    const Timeline t = simulate(fixed_split({384, 384, 128}, {128, 128, 64}, 2), 4);
    CHECK(utilization(t) == 0.90);
  }
  SUBCASE("stream_k g=4: single wave, 100%") {
    const Timeline t = simulate(stream_k({384, 384, 128}, {128, 128, 4}, 4), 4);
    CHECK(t.makespan == 72.0);
    CHECK(utilization(t) == 1.0);
  }
}

TEST_CASE("utilization") {
  SUBCASE("one CTA on four cores") {
    const Timeline t = simulate(data_parallel({128, 128, 128}, {128, 128, 128}), 4);
    CHECK(utilization(t) == 0.25);
  }
  SUBCASE("18 tiles over 4 cores") {
    const Timeline t = simulate(data_parallel({384, 384, 128}, {128, 64, 128}), 4);
    CHECK(utilization(t) == 0.90);
  }
  SUBCASE("single-wave equal durations") {
    const Timeline t = simulate(data_parallel({512, 128, 64}, {128, 128, 16}), 4);
    CHECK(utilization(t) == 1.0);
  }
}

TEST_CASE("every CTA appears exactly once as a mac event") {
  const WorkAssignment a = stream_k({256, 256, 512}, {64, 64, 32}, 11);
  const Timeline t = simulate(a, 4);
  std::vector<int> seen(static_cast<std::size_t>(a.grid_size), 0);
  for (const auto& e : t.events) {
    REQUIRE(e.kind == EventKind::Mac);  // no fixup events at unit cost
    seen[static_cast<std::size_t>(e.cta_id)] += 1;
  }
  for (int count : seen) CHECK(count == 1);
}

TEST_CASE("per-core events are non-overlapping") {
  const WorkAssignment a = stream_k({300, 200, 400}, {64, 64, 16}, 13);
  const Timeline t = simulate(a, 5, CostParams{2, 1, 1, 3});
  std::vector<double> last_end(5, 0.0);
  for (const auto& e : t.events) {  // events are emitted in dispatch order
    CHECK(e.start >= last_end[static_cast<std::size_t>(e.core_id)]);
    last_end[static_cast<std::size_t>(e.core_id)] = e.end;
  }
}

TEST_CASE("work conservation") {
  Rng rng(0x57a7ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const GemmProblem p = random_problem(rng, 256);
    const BlockingFactors b = random_blocking(rng, 64);
    const index_t g = rng.uniform(1, 16);
    const index_t procs = rng.uniform(1, 8);
    const WorkAssignment a = stream_k(p, b, g);
    const Timeline t = simulate(a, procs);
    double mac_total = 0.0;
    for (const auto& e : t.events) {
      if (e.kind == EventKind::Mac) mac_total += e.end - e.start;
    }
    CHECK(mac_total == static_cast<double>(a.grid.total_iters));
  }
}

TEST_CASE("data-parallel unit-cost utilization equals quantization_efficiency") {
  Rng rng(0x9a47ULL);
  for (int trial = 0; trial < 300; ++trial) {
    const GemmProblem p = random_problem(rng, 200);
    const BlockingFactors b = random_blocking(rng, 64);
    const index_t procs = rng.uniform(1, 16);
    const WorkAssignment a = data_parallel(p, b);
    CHECK(utilization(simulate(a, procs)) ==
          quantization_efficiency(a.grid.total_tiles, procs));
  }
}

TEST_CASE("stream_k utilization dominates data-parallel at g = min(p, total_iters)") {
  Rng rng(0xd02eULL);
  for (int trial = 0; trial < 300; ++trial) {
    const GemmProblem p = random_problem(rng, 200);
    const BlockingFactors b = random_blocking(rng, 64);
    const index_t procs = rng.uniform(1, 16);
    const WorkAssignment dp = data_parallel(p, b);
    const index_t g = std::min(procs, dp.grid.total_iters);
    const WorkAssignment sk = stream_k(p, b, g);
    CHECK(utilization(simulate(sk, procs)) >= utilization(simulate(dp, procs)));
  }
}

TEST_CASE("cost-model durations add fixup events") {
  const WorkAssignment a = stream_k({128, 128, 16384}, {128, 128, 32}, 8);
  const CostParams params{10, 5, 1, 2};
  const Timeline t = simulate(a, 8, params);
  index_t reduces = 0;
  double reduce_dur = 0.0;
  for (const auto& e : t.events) {
    if (e.kind == EventKind::FixupReduce) {
      ++reduces;
      reduce_dur += e.end - e.start;
    }
  }
  CHECK(reduces == 1);                 // single tile owner folds all peers
  CHECK(reduce_dur == 2.0 * 7.0);      // d * (8 peers - 1)
}

TEST_CASE("tile-processing skew metric") {
  // Starting k-offsets 0, 32, 64, 96 in units of BLK_K.
  const WorkAssignment a = stream_k({896, 384, 128}, {128, 128, 32}, 4);
  CHECK(tile_processing_skew(a) == 4);
  const WorkAssignment dp = data_parallel({896, 384, 128}, {128, 128, 32});
  CHECK(tile_processing_skew(dp) == 1);
}

TEST_CASE("render_gantt") {
  SUBCASE("deterministic byte-identical output") {
    const Timeline t = simulate(stream_k({384, 384, 128}, {128, 128, 4}, 4), 4);
    std::ostringstream s1, s2;
    render_gantt(t, s1);
    render_gantt(t, s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("<svg") == 0);
  }
  SUBCASE("stream_k g=4: one full-width bar per core row") {
    const Timeline t = simulate(stream_k({384, 384, 128}, {128, 128, 4}, 4), 4);
    CHECK(t.events.size() == 4);
    for (const auto& e : t.events) {
      CHECK(e.start == 0.0);
      CHECK(e.end == t.makespan);
    }
  }
  SUBCASE("empty timeline renders axes only") {
    Timeline t;
    t.p = 4;
    std::ostringstream out;
    render_gantt(t, out);
    CHECK(out.str().find("<svg") == 0);
    CHECK(out.str().find("</svg>") != std::string::npos);
  }
}

TEST_CASE("timeline CSV dump") {
  const Timeline t = simulate(data_parallel({256, 256, 128}, {128, 128, 128}), 2);
  std::ostringstream out;
  write_timeline_csv(t, out);
  CHECK(out.str().rfind("core_id,cta_id,kind,start,end\n", 0) == 0);
  CHECK(out.str().find("mac") != std::string::npos);
}
