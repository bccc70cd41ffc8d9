#include <doctest.h>

#include <stdexcept>

#include "streamk/decompose.hpp"
#include "streamk/types.hpp"
#include "test_util.hpp"

using namespace streamk;

TEST_CASE("tile_grid ceiling formulas") {
  SUBCASE("384x384x128, BLK 128x128x128") {
    const TileGrid g = tile_grid({384, 384, 128}, {128, 128, 128});
    CHECK(g.total_tiles == 9);
    CHECK(g.iters_per_tile == 1);
    CHECK(g.total_iters == 9);
  }
  SUBCASE("256x3584x8192, BLK 128x128x32") {
    const TileGrid g = tile_grid({256, 3584, 8192}, {128, 128, 32});
    CHECK(g.total_tiles == 56);
    CHECK(g.iters_per_tile == 256);
    CHECK(g.total_iters == 14336);
  }
  SUBCASE("identity case") {
    const TileGrid g = tile_grid({1, 1, 1}, {1, 1, 1});
    CHECK(g.total_tiles == 1);
    CHECK(g.iters_per_tile == 1);
    CHECK(g.total_iters == 1);
  }
  SUBCASE("ragged edges round up") {
    const TileGrid g = tile_grid({129, 127, 130}, {128, 128, 128});
    CHECK(g.tiles_m == 2);
    CHECK(g.tiles_n == 1);
    CHECK(g.iters_per_tile == 2);
    CHECK(g.total_iters == 4);
  }
  SUBCASE("invalid inputs rejected") {
    CHECK_THROWS_AS(tile_grid({0, 1, 1}, {1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(tile_grid({1, 1, 1}, {1, 0, 1}), std::invalid_argument);
  }
}

TEST_CASE("iter_to_coords") {
  TileGrid g32 = tile_grid({384, 384, 128}, {128, 128, 4});  // iters_per_tile = 32
  CHECK(g32.iters_per_tile == 32);
  CHECK(iter_to_coords(g32, 0).tile_idx == 0);
  CHECK(iter_to_coords(g32, 0).local_iter == 0);
  CHECK(iter_to_coords(g32, 95).tile_idx == 2);
  CHECK(iter_to_coords(g32, 95).local_iter == 31);

  TileGrid g256 = tile_grid({256, 3584, 8192}, {128, 128, 32});
  CHECK(iter_to_coords(g256, 14335).tile_idx == 55);
  CHECK(iter_to_coords(g256, 14335).local_iter == 255);

  CHECK_THROWS_AS(iter_to_coords(g32, -1), std::out_of_range);
  CHECK_THROWS_AS(iter_to_coords(g32, g32.total_iters), std::out_of_range);
}

TEST_CASE("iter_to_coords round-trips for every index") {
  const TileGrid g = tile_grid({100, 70, 55}, {32, 16, 8});
  for (index_t i = 0; i < g.total_iters; ++i) {
    const TileCoords c = iter_to_coords(g, i);
    CHECK(c.tile_idx * g.iters_per_tile + c.local_iter == i);
  }
}

TEST_CASE("tile_grid is deterministic") {
  const GemmProblem p{1234, 567, 89};
  const BlockingFactors b{48, 32, 9};
  const TileGrid g1 = tile_grid(p, b);
  const TileGrid g2 = tile_grid(p, b);
  CHECK(g1.tiles_m == g2.tiles_m);
  CHECK(g1.tiles_n == g2.tiles_n);
  CHECK(g1.total_iters == g2.total_iters);
}

TEST_CASE("assignment text round-trip") {
  const WorkAssignment a = stream_k({384, 384, 128}, {128, 128, 4}, 4);
  const std::string text = to_text(a);
  const WorkAssignment back = from_text(text);
  CHECK(back.strategy == a.strategy);
  CHECK(back.grid_size == a.grid_size);
  REQUIRE(back.ranges.size() == a.ranges.size());
  for (std::size_t i = 0; i < a.ranges.size(); ++i) {
    CHECK(back.ranges[i].cta_id == a.ranges[i].cta_id);
    CHECK(back.ranges[i].iter_begin == a.ranges[i].iter_begin);
    CHECK(back.ranges[i].iter_end == a.ranges[i].iter_end);
  }
  CHECK(to_text(back) == text);

  const WorkAssignment fs = fixed_split({64, 64, 64}, {32, 32, 16}, 3);
  const WorkAssignment fs_back = from_text(to_text(fs));
  CHECK(fs_back.strategy == Strategy::FixedSplit);
  CHECK(fs_back.split == 3);
}
