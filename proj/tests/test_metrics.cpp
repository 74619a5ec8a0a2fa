#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hypgrid/grid.hpp"
#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"

using namespace hypgrid;

TEST_CASE("same-ring distances match breadth-first search") {
  for (GridParams params : {GridParams{7, 1, 0}, GridParams{7, 1, 1}}) {
    Grid grid(params);
    const int radius = params.b == 0 ? 5 : 4;
    BallOracle oracle(grid, radius);
    RingDistance dist(grid);
    const std::vector<VertexId>& verts = oracle.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const std::vector<int>& row = oracle.distance_row(verts[i]);
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        if (grid.depth(verts[i]) != grid.depth(verts[j])) continue;
        CHECK(dist(verts[i], verts[j]) == row[oracle.index_of(verts[j])]);
      }
    }
  }
}

TEST_CASE("arc bound values") {
  Grid base({7, 1, 0});
  CHECK(compute_d_bound(base) == 2);
  Grid octa({8, 1, 0});
  CHECK(compute_d_bound(octa) == 2);
  Grid refined({7, 1, 1});
  CHECK(compute_d_bound(refined) == 3);
  Grid octa_refined({8, 1, 1});
  CHECK(compute_d_bound(octa_refined) == 3);
}

TEST_CASE("arc bound closed form for deeper subdivisions") {
  // Deeper witnesses appear many rings out (G_{7,2,1}'s first is at ring 8),
  // so these pin the search itself, not just small cases.
  for (int q : {7, 8}) {
    Grid g21({q, 2, 1});
    CHECK(compute_d_bound(g21) == 5);
    Grid g32({q, 3, 2});
    CHECK(compute_d_bound(g32) == 8);
    Grid g33({q, 3, 3});
    CHECK(compute_d_bound(g33) == 9);
  }
}

TEST_CASE("wide arcs never beat descending routes") {
  Grid grid({7, 1, 0});
  const int bound = compute_d_bound(grid);
  RingDistance dist(grid);
  for (int ring = 2; ring <= 5; ++ring) {
    const unsigned long size = grid.ring_size(ring).get_ui();
    VertexId a = grid.ring_vertex(ring, 0);
    for (unsigned long i = 0; i < size; ++i) {
      VertexId b = a;
      for (int arc = 1; arc <= bound + 3; ++arc) {
        b = grid.succ(b);
        if (static_cast<unsigned long>(2 * arc) >= size) break;
        if (arc <= bound) continue;
        auto [pa1, pa2] = grid.parents(a);
        auto [pb1, pb2] = grid.parents(b);
        const int lower = 2 + std::min(std::min(dist(pa1, pb1), dist(pa1, pb2)),
                                       std::min(dist(pa2, pb1), dist(pa2, pb2)));
        CHECK(dist(a, b) == lower);
      }
      a = grid.succ(a);
    }
  }
}

TEST_CASE("growth constants") {
  Grid base({7, 1, 0});
  CHECK(std::abs(growth_constant(base) - (3.0 + std::sqrt(5.0)) / 2.0) < 1e-9);
  Grid octa({8, 1, 0});
  CHECK(std::abs(growth_constant(octa) - (2.0 + std::sqrt(3.0))) < 1e-9);
  Grid refined({7, 1, 1});
  CHECK(std::abs(growth_constant(refined) - 1.72208) < 1e-4);
}

TEST_CASE("growth constant agrees with measured ring growth") {
  Grid grid({7, 1, 1});
  const double gamma = growth_constant(grid);
  const double r10 = grid.ring_size(14).get_d();
  const double r9 = grid.ring_size(13).get_d();
  CHECK(std::abs(r10 / r9 - gamma) < 0.05);
}
