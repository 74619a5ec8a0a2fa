#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"
#include "hypgrid/stg.hpp"

using namespace hypgrid;

namespace {

RghtStg make_stg(Grid& grid) { return RghtStg(grid, compute_d_bound(grid)); }

void check_realization(Grid& grid, int radius) {
  RghtStg stg = make_stg(grid);
  BallOracle oracle(grid, radius);
  const auto& verts = oracle.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const auto& row = oracle.distance_row(verts[i]);
    for (std::size_t j = i; j < verts.size(); ++j) {
      const int got = stg_distance(stg, stg.vertex_node(verts[i]), stg.vertex_node(verts[j]));
      REQUIRE(got == row[oracle.index_of(verts[j])]);
    }
  }
}

}  // namespace

TEST_CASE("single-vertex nodes and reflexivity") {
  Grid grid({7, 1, 0});
  RghtStg stg = make_stg(grid);
  const VertexId v = grid.ring_vertex(3, 5);
  CHECK(stg.is_vertex(stg.vertex_node(v)));
  CHECK_FALSE(stg.is_vertex(stg.segment(v, 2)));
  CHECK(stg.near(stg.vertex_node(v), stg.vertex_node(v)) == 0);
  CHECK(stg_distance(stg, stg.root(), stg.vertex_node(v)) == 3);
  CHECK(stg_distance(stg, stg.vertex_node(v), stg.vertex_node(grid.succ(v))) == 1);
}

TEST_CASE("distances match breadth-first search on triangulation balls") {
  Grid base({7, 1, 0});
  check_realization(base, 5);
  Grid refined({7, 1, 1});
  check_realization(refined, 4);
  Grid octa_refined({8, 1, 1});
  check_realization(octa_refined, 4);
}

TEST_CASE("parent and child segments invert each other") {
  Grid grid({7, 1, 0});
  RghtStg stg = make_stg(grid);
  for (int ring = 1; ring <= 4; ++ring) {
    const long n = grid.ring_size(ring).get_si();
    VertexId v = grid.ring_vertex(ring, 0);
    for (long i = 0; i < n; ++i, v = grid.succ(v)) {
      const long max_len = std::min<long>(compute_d_bound(grid) + 1, n);
      for (long len = 1; len <= max_len; ++len) {
        const StgNode s = stg.segment(v, len);
        const StgNode p = stg.parent(s);
        CHECK(stg.depth0(p) == ring - 1);
        const auto siblings = stg.child_segments(p);
        CHECK(std::count(siblings.begin(), siblings.end(), s) == 1);
      }
    }
  }
}

TEST_CASE("near relation closes under parents and respects bounds") {
  Grid grid({7, 1, 1});
  RghtStg stg = make_stg(grid);
  for (int ring = 2; ring <= 5; ++ring) {
    VertexId v = grid.ring_vertex(ring, 0);
    const long n = std::min<long>(grid.ring_size(ring).get_si(), 40);
    for (long i = 0; i < n; ++i, v = grid.succ(v)) {
      const StgNode s = stg.segment(v, 1 + (i % 3));
      const auto nbrs = stg.neighbors(s);
      CHECK(static_cast<int>(nbrs.size()) <= stg.neighbor_bound());
      for (const auto& [t, base] : nbrs) {
        CHECK(base <= stg.base_distance_bound());
        CHECK(stg.near(t, s) == base);  // symmetry
        if (ring > 1) CHECK(stg.near(stg.parent(s), stg.parent(t)).has_value());
      }
    }
  }
}

TEST_CASE("metric axioms on sampled triples") {
  Grid grid({7, 1, 1});
  RghtStg stg = make_stg(grid);
  const auto verts = ball_vertices(grid, 6);
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<std::size_t> pick(0, verts.size() - 1);
  for (int rep = 0; rep < 1000; ++rep) {
    const StgNode a = stg.vertex_node(verts[pick(rng)]);
    const StgNode b = stg.vertex_node(verts[pick(rng)]);
    const StgNode c = stg.vertex_node(verts[pick(rng)]);
    const int ab = stg_distance(stg, a, b);
    const int ba = stg_distance(stg, b, a);
    const int bc = stg_distance(stg, b, c);
    const int ac = stg_distance(stg, a, c);
    CHECK(ab == ba);
    CHECK((ab == 0) == (a == b));
    CHECK(ac <= ab + bc);
  }
}

TEST_CASE("class keys identify rotated and translated configurations") {
  Grid grid({7, 1, 0});
  RghtStg stg = make_stg(grid);
  // The grid has a 7-fold rotational symmetry, so shifting a configuration by
  // ring_size/7 must land in the same class.
  const long shift = grid.ring_size(5).get_si() / 7;
  const VertexId v = grid.ring_vertex(5, 3);
  const VertexId w = grid.advance(v, static_cast<std::uint32_t>(shift));
  const std::vector<StgNode> t1{stg.vertex_node(v), stg.vertex_node(grid.succ(v))};
  const std::vector<StgNode> t2{stg.vertex_node(w), stg.vertex_node(grid.succ(w))};
  CHECK(stg.tuple_class_key(t1) == stg.tuple_class_key(t2));
  const std::vector<StgNode> diagonal{stg.vertex_node(v), stg.vertex_node(v)};
  CHECK(stg.tuple_class_key(t1) != stg.tuple_class_key(diagonal));
  // Small rings rotate too.
  const VertexId r2 = grid.ring_vertex(2, 0);
  const VertexId r2s = grid.advance(r2, 3);
  CHECK(stg.tuple_class_key({stg.vertex_node(r2)}) ==
        stg.tuple_class_key({stg.vertex_node(r2s)}));
}

TEST_CASE("binary grid nodes") {
  BinaryStg stg(3);
  const StgNode p = stg.parent(stg.point({5, 3}, 3));
  CHECK(p == stg.point({2, 1}, 2));
  BinaryStg flat(2);
  CHECK(flat.near(flat.point({0}, 3), flat.point({1}, 3)) == 1);
  // Far apart on their own level, so the distance comes from higher levels.
  CHECK_FALSE(flat.near(flat.point({0}, 6), flat.point({9}, 6)).has_value());
  CHECK(stg_distance(flat, flat.point({0}, 6), flat.point({9}, 6)) == 6);
  CHECK_THROWS_WITH_AS(flat.point({4}, 2), doctest::Contains("invalid-params"),
                       std::runtime_error);
}

TEST_CASE("binary distances match box breadth-first search") {
  for (int d : {2, 3}) {
    BinaryStg stg(d);
    const int cap = d == 2 ? 5 : 4;
    std::vector<StgNode> nodes;
    for (int t = 0; t <= cap; ++t) {
      std::vector<std::int64_t> x(d - 1, 0);
      while (true) {
        nodes.push_back(stg.point(x, t));
        int i = 0;
        for (; i < d - 1; ++i) {
          if (++x[i] < (1ll << t)) break;
          x[i] = 0;
        }
        if (i == d - 1) break;
      }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i; j < nodes.size(); ++j) {
        std::vector<std::int64_t> ca = stg.coords_of(nodes[i]);
        std::vector<std::int64_t> cb = stg.coords_of(nodes[j]);
        ca.push_back(nodes[i].f[2]);
        cb.push_back(nodes[j].f[2]);
        REQUIRE(stg_distance(stg, nodes[i], nodes[j]) == binary_box_distance(d, ca, cb, cap));
      }
    }
  }
}
