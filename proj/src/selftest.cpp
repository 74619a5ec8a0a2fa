#include "hypgrid/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include "hypgrid/centrality.hpp"
#include "hypgrid/counter.hpp"
#include "hypgrid/dhrg.hpp"
#include "hypgrid/grid.hpp"
#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"
#include "hypgrid/paircount.hpp"
#include "hypgrid/stg.hpp"
#include "hypgrid/template_graph.hpp"

namespace hypgrid {
namespace {

void check(SuiteResult& r, bool ok) {
  ++r.checks;
  if (!ok) ++r.failures;
}

bool near(double x, double y, double tol) {
  return std::fabs(x - y) <= tol * std::max({1.0, std::fabs(x), std::fabs(y)});
}

/** Segment-tree distances against ball-restricted breadth-first search. */
SuiteResult suite_distance() {
  SuiteResult r{"distance"};
  const GridParams cases[] = {{7, 1, 0}, {7, 1, 1}};
  for (const GridParams& params : cases) {
    Grid grid(params);
    const int radius = params.b == 0 ? 4 : 3;
    RghtStg stg(grid, compute_d_bound(grid));
    BallOracle oracle(grid, radius);
    const std::vector<VertexId>& verts = oracle.vertices();
    std::vector<StgNode> nodes;
    nodes.reserve(verts.size());
    for (VertexId v : verts) nodes.push_back(stg.vertex_node(v));
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i; j < verts.size(); ++j) {
        check(r, stg_distance(stg, nodes[i], nodes[j]) == oracle.distance(verts[i], verts[j]));
      }
    }
  }
  BinaryStg stg(2);
  std::vector<std::pair<std::int64_t, std::int64_t>> pts;
  for (std::int64_t t = 0; t <= 3; ++t) {
    for (std::int64_t x = 0; x < (std::int64_t{1} << t); ++x) pts.emplace_back(x, t);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      const StgNode a = stg.point({pts[i].first}, pts[i].second);
      const StgNode b = stg.point({pts[j].first}, pts[j].second);
      const int expected = binary_box_distance(2, {pts[i].first, pts[i].second},
                                               {pts[j].first, pts[j].second}, 8);
      check(r, stg_distance(stg, a, b) == expected);
    }
  }
  return r;
}

/** Embedding counters against direct enumeration over all maps. */
SuiteResult suite_counter() {
  SuiteResult r{"counter"};
  Grid grid(GridParams{7, 1, 0});
  const int radius = 2;
  RghtStg stg(grid, compute_d_bound(grid));
  const std::vector<VertexId> ball = ball_vertices(grid, radius);
  std::mt19937 rng(20260823u);

  const std::pair<TemplateGraph, int> cases[] = {
      {TemplateGraph::edge(0, 1), 2},
      {TemplateGraph::triangle(), 1},
  };
  for (const auto& [tmpl, colors] : cases) {
    DistanceCounter counter(stg, tmpl, radius);
    std::vector<std::unordered_map<VertexId, double>> values(colors);
    for (int step = 0; step < 12; ++step) {
      const VertexId v = ball[rng() % ball.size()];
      const int color = step % colors;
      const double x = 1.0 + static_cast<double>(rng() % 3);
      counter.add(color, stg.vertex_node(v), x);
      values[static_cast<std::size_t>(color)][v] += x;
    }
    const auto expected = enumerate_embeddings(grid, radius, tmpl, values);
    for (const auto& [key, val] : expected) {
      DistanceQuery q;
      q.vertex.assign(key.begin(), key.begin() + tmpl.vertex_count);
      q.edge.assign(key.begin() + tmpl.vertex_count, key.end());
      check(r, near(counter.count(q), val, 1e-9));
    }
    DistanceQuery empty_probe;
    empty_probe.vertex.assign(static_cast<std::size_t>(tmpl.vertex_count), radius + 1);
    empty_probe.edge.assign(tmpl.edges.size(), 0);
    check(r, counter.count(empty_probe) == 0.0);
  }

  // Bulk regular initialization against all-ones enumeration.
  const TemplateGraph path = TemplateGraph::path3();
  DistanceCounter bulk(stg, path, radius);
  bulk.init_regular(0);
  std::vector<std::unordered_map<VertexId, double>> ones(1);
  for (VertexId v : ball) ones[0][v] = 1.0;
  const auto expected = enumerate_embeddings(grid, radius, path, ones);
  for (const auto& [key, val] : expected) {
    DistanceQuery q;
    q.vertex.assign(key.begin(), key.begin() + path.vertex_count);
    q.edge.assign(key.begin() + path.vertex_count, key.end());
    check(r, near(bulk.count(q), val, 1e-9));
  }
  return r;
}

/** Pair histograms and indexed selection against direct pair loops. */
SuiteResult suite_paircount() {
  SuiteResult r{"paircount"};
  Grid grid(GridParams{7, 1, 0});
  const int radius = 3;
  RghtStg stg(grid, compute_d_bound(grid));
  const std::vector<VertexId> ball = ball_vertices(grid, radius);
  std::mt19937 rng(7u);

  PairCounter pc(stg, radius);
  std::vector<std::pair<VertexId, double>> weighted;
  for (int step = 0; step < 15; ++step) {
    const VertexId v = ball[rng() % ball.size()];
    const double x = 1.0 + static_cast<double>(step % 3);
    pc.add(stg.vertex_node(v), x);
    weighted.emplace_back(v, x);
    const std::vector<double> brute = brute_pair_histogram(grid, radius, weighted);
    for (int d = 0; d <= 2 * radius; ++d) {
      check(r, near(pc.count(d), brute[static_cast<std::size_t>(d)], 1e-9));
    }
  }

  // Unit values at distinct vertices: profiles and selection versus BFS.
  BallOracle oracle(grid, radius);
  PairCounter sel(stg, radius);
  std::vector<VertexId> marked;
  for (std::size_t i = 0; i < ball.size(); i += 7) marked.push_back(ball[i]);
  for (VertexId v : marked) sel.add(stg.vertex_node(v), 1.0);
  const VertexId center = marked[1];
  const std::vector<double> profile = sel.distance_profile(stg.vertex_node(center));
  for (int d = 0; d <= 2 * radius; ++d) {
    long expected = 0;
    std::set<VertexId> expected_set;
    for (VertexId w : marked) {
      if (w != center && oracle.distance(center, w) == d) {
        ++expected;
        expected_set.insert(w);
      }
    }
    check(r, near(profile[static_cast<std::size_t>(d)], static_cast<double>(expected), 1e-9));
    std::set<VertexId> got;
    for (long long idx = 1; idx <= expected; ++idx) {
      got.insert(stg.left_vertex(sel.select_at_distance(stg.vertex_node(center), d, idx)));
    }
    check(r, got == expected_set);
  }
  return r;
}

/** Likelihood and move deltas against the quadratic reference sum. */
SuiteResult suite_loglik() {
  SuiteResult r{"loglik"};
  Grid grid(GridParams{7, 1, 0});
  const int radius = 4;
  const int n = 20;
  RghtStg stg(grid, compute_d_bound(grid));
  const std::vector<VertexId> ball = ball_vertices(grid, radius);
  std::mt19937 rng(99u);

  std::vector<VertexId> emb;
  for (int i = 0; i < n; ++i) emb.push_back(ball[rng() % ball.size()]);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng() % 100 < 30) edges.emplace_back(i, j);
    }
  }
  DhrgModel model{n, radius, DhrgModel::exponential_radial(radius, 0.8),
                  DhrgModel::logistic_conn(radius, 0.7, -2.0)};
  DhrgInstance inst(model, grid, stg, emb, edges);
  check(r, near(inst.loglik(), brute_loglik(grid, radius, emb, edges, model.conn), 1e-9));

  for (int step = 0; step < 10; ++step) {
    const int v = static_cast<int>(rng() % n);
    const VertexId to = ball[rng() % ball.size()];
    const double before = inst.loglik();
    const double delta = inst.move(v, to);
    emb[static_cast<std::size_t>(v)] = to;
    check(r, near(inst.loglik(), before + delta, 1e-9));
    check(r, near(inst.loglik(), brute_loglik(grid, radius, emb, edges, model.conn), 1e-9));
  }
  return r;
}

/** Counter-based centrality scores against the direct triple loop. */
SuiteResult suite_betweenness() {
  SuiteResult r{"betweenness"};
  Grid grid(GridParams{7, 1, 0});
  const int radius = 3;
  RghtStg stg(grid, compute_d_bound(grid));
  const std::vector<VertexId> ball = ball_vertices(grid, radius);
  std::mt19937 rng(5u);

  std::vector<VertexId> positions;
  for (int i = 0; i < 12; ++i) positions.push_back(ball[rng() % ball.size()]);
  positions[3] = positions[0];
  for (double gamma : {0.0, 0.5}) {
    const BetweennessResult res = pseudo_betweenness(stg, radius, positions, gamma);
    const std::vector<double> brute = brute_betweenness(grid, radius, positions, gamma);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      check(r, near(res.scores[i], brute[i], gamma == 0.0 ? 0.0 : 1e-9));
    }
  }
  return r;
}

}  // namespace

const std::vector<std::string>& selftest_suite_names() {
  static const std::vector<std::string> names = {"distance", "counter", "paircount", "loglik",
                                                 "betweenness"};
  return names;
}

SuiteResult run_selftest_suite(const std::string& name) {
  if (name == "distance") return suite_distance();
  if (name == "counter") return suite_counter();
  if (name == "paircount") return suite_paircount();
  if (name == "loglik") return suite_loglik();
  if (name == "betweenness") return suite_betweenness();
  throw std::invalid_argument("invalid-params: unknown selftest suite: " + name);
}

}  // namespace hypgrid
