#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "hypgrid/centrality.hpp"
#include "hypgrid/grid.hpp"
#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"
#include "hypgrid/stg.hpp"

using namespace hypgrid;

TEST_CASE("a single vertex scores one") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  for (const double gamma : {0.0, 0.5}) {
    const BetweennessResult r = pseudo_betweenness(stg, 3, {0}, gamma);
    REQUIRE(r.scores.size() == 1);
    CHECK(r.scores[0] == 1.0);
    CHECK(r.gamma == gamma);
  }
}

TEST_CASE("a collinear triple counts its through pairs at gamma zero") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 3;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  BallOracle oracle(grid, R);
  // depth-2 vertex, its depth-1 parent, and the root lie on a shortest path
  VertexId a = kNoVertex, v = kNoVertex;
  for (const VertexId cand : ball)
    if (grid.depth(cand) == 2) {
      a = cand;
      v = grid.parents(cand).first;
      break;
    }
  REQUIRE(a != kNoVertex);
  REQUIRE(oracle.distance(a, 0) == 2);
  REQUIRE(oracle.distance(a, v) + oracle.distance(v, 0) == 2);
  const BetweennessResult r = pseudo_betweenness(stg, R, {a, v, 0}, 0.0);
  // (a,root)+(root,a) through v, four ordered pairs with endpoint v, and (v,v)
  CHECK(r.scores[1] == 7.0);
  const std::vector<double> want = brute_betweenness(grid, R, {a, v, 0}, 0.0);
  for (int i = 0; i < 3; ++i) CHECK(r.scores[(std::size_t)i] == want[(std::size_t)i]);
}

TEST_CASE("scores match the direct triple loop") {
  for (const GridParams params : {GridParams{7, 1, 0}, GridParams{7, 1, 1}}) {
    CAPTURE(params.b);
    Grid grid(params);
    RghtStg stg(grid, compute_d_bound(grid));
    const int R = params.b == 0 ? 4 : 3;
    const int n = 25;
    const std::vector<VertexId> ball = ball_vertices(grid, R);
    std::mt19937_64 rng(2024u + (unsigned)params.b);
    std::vector<VertexId> pos((std::size_t)n);
    for (int i = 0; i < n; ++i) pos[(std::size_t)i] = ball[rng() % ball.size()];
    pos[1] = pos[0];  // coincident positions must behave
    const BetweennessResult exact = pseudo_betweenness(stg, R, pos, 0.0);
    const std::vector<double> exact_want = brute_betweenness(grid, R, pos, 0.0);
    for (int i = 0; i < n; ++i)
      CHECK(exact.scores[(std::size_t)i] == exact_want[(std::size_t)i]);
    const BetweennessResult half = pseudo_betweenness(stg, R, pos, 0.5);
    const std::vector<double> half_want = brute_betweenness(grid, R, pos, 0.5);
    for (int i = 0; i < n; ++i)
      CHECK(half.scores[(std::size_t)i] ==
            doctest::Approx(half_want[(std::size_t)i]).epsilon(1e-9));
    for (int i = 0; i < n; ++i) CHECK(half.scores[(std::size_t)i] >= 0.0);
  }
}

TEST_CASE("relabeling vertices permutes the scores") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 4, n = 15;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  std::mt19937_64 rng(11);
  std::vector<VertexId> pos((std::size_t)n);
  for (int i = 0; i < n; ++i) pos[(std::size_t)i] = ball[rng() % ball.size()];
  std::vector<int> perm((std::size_t)n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<VertexId> shuffled((std::size_t)n);
  for (int i = 0; i < n; ++i) shuffled[(std::size_t)i] = pos[(std::size_t)perm[(std::size_t)i]];
  const BetweennessResult base = pseudo_betweenness(stg, R, pos, 0.5);
  const BetweennessResult moved = pseudo_betweenness(stg, R, shuffled, 0.5);
  for (int i = 0; i < n; ++i)
    CHECK(moved.scores[(std::size_t)i] ==
          doctest::Approx(base.scores[(std::size_t)perm[(std::size_t)i]]).epsilon(1e-12));
}

TEST_CASE("scores never decrease in gamma") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 4, n = 15;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  std::mt19937_64 rng(13);
  std::vector<VertexId> pos((std::size_t)n);
  for (int i = 0; i < n; ++i) pos[(std::size_t)i] = ball[rng() % ball.size()];
  const BetweennessResult g0 = pseudo_betweenness(stg, R, pos, 0.0);
  const BetweennessResult g3 = pseudo_betweenness(stg, R, pos, 0.3);
  const BetweennessResult g6 = pseudo_betweenness(stg, R, pos, 0.6);
  for (int i = 0; i < n; ++i) {
    CHECK(g3.scores[(std::size_t)i] >= g0.scores[(std::size_t)i] - 1e-12);
    CHECK(g6.scores[(std::size_t)i] >= g3.scores[(std::size_t)i] - 1e-12);
  }
}

TEST_CASE("betweenness rejects invalid parameters") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  CHECK_THROWS_WITH_AS(pseudo_betweenness(stg, 3, {0}, 1.0),
                       doctest::Contains("invalid-params"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(pseudo_betweenness(stg, 3, {0}, -0.1),
                       doctest::Contains("invalid-params"), std::invalid_argument);
  const std::vector<VertexId> deep = ball_vertices(grid, 4);
  CHECK_THROWS_WITH_AS(pseudo_betweenness(stg, 3, {deep.back()}, 0.5),
                       doctest::Contains("out-of-ball"), std::out_of_range);
  const BetweennessResult empty = pseudo_betweenness(stg, 3, {}, 0.5);
  CHECK(empty.scores.empty());
}
