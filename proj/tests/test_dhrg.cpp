#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "hypgrid/dhrg.hpp"
#include "hypgrid/grid.hpp"
#include "hypgrid/metrics.hpp"
#include "hypgrid/oracle.hpp"
#include "hypgrid/stg.hpp"

using namespace hypgrid;

namespace {

DhrgModel logistic_model(int n, int radius, double alpha, double t, double midpoint) {
  DhrgModel model;
  model.n = n;
  model.radius = radius;
  model.radial = DhrgModel::exponential_radial(radius, alpha);
  model.conn = DhrgModel::logistic_conn(radius, t, -t * midpoint);
  return model;
}

}  // namespace

TEST_CASE("model validation rejects bad tables") {
  DhrgModel model = logistic_model(10, 3, 0.5, 1.0, 3.0);
  CHECK_NOTHROW(model.validate());
  DhrgModel bad = model;
  bad.n = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("invalid-params"),
                       std::invalid_argument);
  bad = model;
  bad.radius = 32;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("invalid-params"),
                       std::invalid_argument);
  bad = model;
  bad.radial[0] += 0.25;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sum to 1"),
                       std::invalid_argument);
  bad = model;
  bad.radial.pop_back();
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("radius+1"),
                       std::invalid_argument);
  bad = model;
  bad.conn[2] = 1.5;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("outside [0, 1]"),
                       std::invalid_argument);
  bad = model;
  bad.conn.push_back(0.5);
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("2*radius+1"),
                       std::invalid_argument);
  CHECK(DhrgModel::exponential_radial(4, 0.0) ==
        std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2});
}

TEST_CASE("likelihood matches direct computation") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 6, n = 50;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  std::mt19937_64 rng(4242);
  DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.75, 5.0);
  std::vector<VertexId> emb((std::size_t)n);
  for (int v = 0; v < n; ++v) emb[(std::size_t)v] = ball[rng() % ball.size()];
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int w = u + 1; w < n; ++w)
      if ((double)(rng() >> 11) * 0x1p-53 < 0.15) edges.emplace_back(u, w);
  DhrgInstance inst(model, grid, stg, emb, edges);
  const double direct = brute_loglik(grid, R, emb, edges, model.conn);
  CHECK(inst.loglik() == doctest::Approx(direct).epsilon(1e-11));
  double pair_total = 0.0;
  for (int d = 0; d <= 2 * R; ++d) pair_total += inst.pair_count(d);
  CHECK(pair_total == doctest::Approx(n * (n - 1) / 2.0).epsilon(1e-12));
}

TEST_CASE("move deltas match recomputation and reverse cleanly") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 5, n = 40;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  std::mt19937_64 rng(77);
  DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.75, 4.0);
  std::vector<VertexId> emb((std::size_t)n);
  for (int v = 0; v < n; ++v) emb[(std::size_t)v] = ball[rng() % ball.size()];
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int w = u + 1; w < n; ++w)
      if ((double)(rng() >> 11) * 0x1p-53 < 0.2) edges.emplace_back(u, w);
  DhrgInstance inst(model, grid, stg, emb, edges);
  for (int t = 0; t < 40; ++t) {
    const int v = (int)(rng() % (std::uint64_t)n);
    const VertexId to = ball[rng() % ball.size()];
    const double before = inst.loglik();
    const double delta = inst.move(v, to);
    const double after = inst.loglik();
    CHECK(after - before == doctest::Approx(delta).epsilon(1e-9));
    const double direct = brute_loglik(grid, R, inst.embedding(), edges, model.conn);
    CHECK(after == doctest::Approx(direct).epsilon(1e-9));
  }
  CHECK(inst.move(3, inst.embedding()[3]) == 0.0);
  const VertexId old3 = inst.embedding()[3];
  const double fwd = inst.move(3, ball[7]);
  const double back = inst.move(3, old3);
  CHECK(fwd + back == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate probabilities yield zero or minus infinity") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 3;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  BallOracle oracle(grid, R);
  const std::vector<VertexId> emb = {ball[0], ball[2], ball[40]};
  const std::vector<std::pair<int, int>> all_edges = {{0, 1}, {0, 2}, {1, 2}};
  DhrgModel model;
  model.n = 3;
  model.radius = R;
  model.radial = DhrgModel::exponential_radial(R, 0.0);
  // p = 1 exactly at realized pair distances, 0 elsewhere: perfect model
  model.conn.assign((std::size_t)(2 * R) + 1, 0.0);
  for (int u = 0; u < 3; ++u)
    for (int w = u + 1; w < 3; ++w)
      model.conn[(std::size_t)oracle.distance(emb[(std::size_t)u],
                                              emb[(std::size_t)w])] = 1.0;
  DhrgInstance perfect(model, grid, stg, emb, all_edges);
  CHECK(perfect.loglik() == 0.0);
  // an edge where p = 0 is impossible
  DhrgModel zero = model;
  zero.conn.assign((std::size_t)(2 * R) + 1, 0.0);
  DhrgInstance impossible(zero, grid, stg, emb, all_edges);
  CHECK(impossible.loglik() == -std::numeric_limits<double>::infinity());
  // a non-edge where p = 1 is impossible too
  DhrgInstance missing(model, grid, stg, emb, {{0, 1}});
  CHECK(missing.loglik() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("generation reproduces the degenerate models") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  DhrgModel model = logistic_model(12, 3, 0.7, 1.0, 2.0);
  model.conn.assign(7, 1.0);
  const DhrgInstance complete = DhrgInstance::generate(model, grid, stg, 99);
  CHECK((int)complete.edges().size() == 12 * 11 / 2);
  model.conn.assign(7, 0.0);
  const DhrgInstance empty = DhrgInstance::generate(model, grid, stg, 99);
  CHECK(empty.edges().empty());
  CHECK(empty.embedding() == complete.embedding());
  const DhrgInstance again = DhrgInstance::generate(model, grid, stg, 99);
  CHECK(again.embedding() == empty.embedding());
}

TEST_CASE("generated edge counts follow the connection table") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 6, n = 300;
  DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.75, 5.0);
  const DhrgInstance inst = DhrgInstance::generate(model, grid, stg, 31337);
  const DhrgInstance again = DhrgInstance::generate(model, grid, stg, 31337);
  CHECK(inst.edges() == again.edges());
  CHECK(inst.embedding() == again.embedding());
  BallOracle oracle(grid, R);
  double mean = 0.0, var = 0.0;
  for (int u = 0; u < n; ++u)
    for (int w = u + 1; w < n; ++w) {
      const double p = model.conn[(std::size_t)oracle.distance(
          inst.embedding()[(std::size_t)u], inst.embedding()[(std::size_t)w])];
      mean += p;
      var += p * (1.0 - p);
    }
  CHECK(std::fabs((double)inst.edges().size() - mean) <= 3.0 * std::sqrt(var));
  double pair_total = 0.0, edge_total = 0.0;
  for (int d = 0; d <= 2 * R; ++d) {
    CHECK(inst.edge_count(d) <= inst.pair_count(d) + 1e-9);
    pair_total += inst.pair_count(d);
    edge_total += inst.edge_count(d);
  }
  CHECK(pair_total == doctest::Approx(n * (n - 1) / 2.0).epsilon(1e-9));
  CHECK(edge_total == doctest::Approx((double)inst.edges().size()).epsilon(1e-12));
  std::vector<double> recount((std::size_t)(2 * R) + 1, 0.0);
  for (const auto& [u, w] : inst.edges()) {
    CHECK(u < w);
    recount[(std::size_t)oracle.distance(inst.embedding()[(std::size_t)u],
                                         inst.embedding()[(std::size_t)w])] += 1.0;
  }
  for (int d = 0; d <= 2 * R; ++d)
    CHECK(inst.edge_count(d) == doctest::Approx(recount[(std::size_t)d]));
}

TEST_CASE("expected statistics closed forms at extreme probabilities") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 4, n = 40;
  DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.75, 4.0);
  model.conn.assign((std::size_t)(2 * R) + 1, 1.0);
  const ExpectedStats all = dhrg_expected_stats(model, grid, stg);
  CHECK(all.avg_degree == doctest::Approx((double)n).epsilon(1e-9));
  CHECK(all.clustering_defined);
  CHECK(all.clustering == doctest::Approx(1.0).epsilon(1e-9));
  for (int r = 0; r <= R; ++r)
    CHECK(all.degree_by_radius[(std::size_t)r] == doctest::Approx((double)n).epsilon(1e-9));
  model.conn.assign((std::size_t)(2 * R) + 1, 0.0);
  const ExpectedStats none = dhrg_expected_stats(model, grid, stg);
  CHECK(none.avg_degree == 0.0);
  CHECK(!none.clustering_defined);
  CHECK(std::isnan(none.clustering));
}

TEST_CASE("expected statistics match a pooled Monte Carlo estimate") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 4, n = 40, runs = 200;
  const DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.75, 4.0);
  const ExpectedStats stats = dhrg_expected_stats(model, grid, stg);
  double deg_sum = 0.0, deg_sq = 0.0;
  std::vector<double> tris((std::size_t)runs), wedges((std::size_t)runs);
  for (int t = 0; t < runs; ++t) {
    const DhrgInstance inst = DhrgInstance::generate(model, grid, stg, 50000 + (unsigned)t);
    const double avg = 2.0 * (double)inst.edges().size() / (n - 1);
    deg_sum += avg;
    deg_sq += avg * avg;
    std::vector<std::set<int>> adj((std::size_t)n);
    for (const auto& [u, w] : inst.edges()) {
      adj[(std::size_t)u].insert(w);
      adj[(std::size_t)w].insert(u);
    }
    double wedge = 0.0, tri = 0.0;
    for (int v = 0; v < n; ++v) {
      const double dv = (double)adj[(std::size_t)v].size();
      wedge += dv * (dv - 1.0);
      for (const int x : adj[(std::size_t)v])
        for (const int y : adj[(std::size_t)v])
          if (x < y && adj[(std::size_t)x].count(y)) tri += 2.0;
    }
    tris[(std::size_t)t] = tri;
    wedges[(std::size_t)t] = wedge;
  }
  const double deg_mean = deg_sum / runs;
  const double deg_se = std::sqrt((deg_sq / runs - deg_mean * deg_mean) / runs);
  CHECK(std::fabs(stats.avg_degree - deg_mean) <= 4.0 * deg_se);
  double tri_total = 0.0, wedge_total = 0.0;
  for (int t = 0; t < runs; ++t) {
    tri_total += tris[(std::size_t)t];
    wedge_total += wedges[(std::size_t)t];
  }
  const double pooled = tri_total / wedge_total;
  const double wbar = wedge_total / runs;
  double lin = 0.0;
  for (int t = 0; t < runs; ++t) {
    const double z = (tris[(std::size_t)t] - pooled * wedges[(std::size_t)t]) / wbar;
    lin += z * z;
  }
  const double pooled_se = std::sqrt(lin) / runs;
  CHECK(std::fabs(stats.clustering - pooled) <= 4.0 * pooled_se);
}

TEST_CASE("local search accepts improvements only") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 5, n = 60;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  const DhrgModel model = logistic_model(n, R, 0.75 * std::log(2.618), 0.9, 4.0);
  int improved = 0;
  for (unsigned run = 0; run < 5; ++run) {
    DhrgInstance inst = DhrgInstance::generate(model, grid, stg, 1000 + run);
    std::mt19937_64 rng(500 + run);
    for (int k = 0; k < 20; ++k)
      inst.move((int)(rng() % (std::uint64_t)n), ball[rng() % ball.size()]);
    const double before = inst.loglik();
    const SearchLog log = inst.local_search(300, 777 + run);
    const double after = inst.loglik();
    CHECK(log.trace.front() == before);
    for (std::size_t i = 1; i < log.trace.size(); ++i)
      CHECK(log.trace[i] >= log.trace[i - 1]);
    for (const MoveRecord& mv : log.accepted) CHECK(mv.delta > 0.0);
    CHECK(after >= before);
    if (after > before) ++improved;
    const SearchLog idle = inst.local_search(0, 1);
    CHECK(idle.accepted.empty());
    CHECK(idle.trace.size() == 1);
  }
  CHECK(improved >= 4);
}

TEST_CASE("instances reject invalid input") {
  Grid grid(GridParams{7, 1, 0});
  RghtStg stg(grid, compute_d_bound(grid));
  const int R = 3;
  const std::vector<VertexId> ball = ball_vertices(grid, R);
  DhrgModel model = logistic_model(3, R, 0.5, 1.0, 2.0);
  const std::vector<VertexId> emb = {ball[0], ball[1], ball[2]};
  CHECK_THROWS_WITH_AS(DhrgInstance(model, grid, stg, {ball[0]}, {}),
                       doctest::Contains("invalid-params"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(DhrgInstance(model, grid, stg, emb, {{0, 3}}),
                       doctest::Contains("invalid-params"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(DhrgInstance(model, grid, stg, emb, {{1, 1}}),
                       doctest::Contains("self loop"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(DhrgInstance(model, grid, stg, emb, {{0, 1}, {1, 0}}),
                       doctest::Contains("duplicate"), std::invalid_argument);
  const std::vector<VertexId> deep = ball_vertices(grid, R + 1);
  CHECK_THROWS_WITH_AS(DhrgInstance(model, grid, stg, {ball[0], ball[1], deep.back()}, {}),
                       doctest::Contains("out-of-ball"), std::out_of_range);
  DhrgInstance inst(model, grid, stg, emb, {{0, 1}});
  CHECK_THROWS_WITH_AS(inst.move(5, ball[0]), doctest::Contains("invalid-params"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(inst.move(0, deep.back()), doctest::Contains("out-of-ball"),
                       std::out_of_range);
  CHECK(inst.pair_count(100) == 0.0);
  CHECK(inst.edge_count(-2) == 0.0);
}
