#include "hypgrid/dhrg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "hypgrid/counter.hpp"

namespace hypgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
/** Counts are integers maintained in floating point; below this is zero. */
constexpr double kCountEps = 1e-6;

int validated_radius(const DhrgModel& model) {
  model.validate();
  return model.radius;
}

/** Uniform double in [0, 1) from the top 53 bits. */
double unit_interval(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

/**
 * Geometric step with success probability p: the number of candidates to
 * advance until the next success, support {1, 2, ...}.  Out-of-range results
 * are clamped to a value larger than any candidate count.
 */
long long geometric_step(std::mt19937_64& rng, double p) {
  constexpr long long kBeyond = std::numeric_limits<long long>::max() / 2;
  if (p >= 1.0) return 1;
  if (p <= 0.0) return kBeyond;
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  const double step = std::floor(std::log(u) / std::log1p(-p));
  if (!(step < static_cast<double>(kBeyond))) return kBeyond;
  return 1 + static_cast<long long>(step);
}

}  // namespace

void DhrgModel::validate() const {
  if (n < 1) throw std::invalid_argument("invalid-params: n must be at least 1");
  if (radius < 0 || radius > 31)
    throw std::invalid_argument("invalid-params: radius must be in [0, 31]");
  if ((int)radial.size() != radius + 1)
    throw std::invalid_argument("invalid-params: radial table must have radius+1 entries");
  double sum = 0.0;
  for (double w : radial) {
    if (!(w >= 0.0)) throw std::invalid_argument("invalid-params: negative radial weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("invalid-params: radial table must sum to 1");
  if ((int)conn.size() != 2 * radius + 1)
    throw std::invalid_argument("invalid-params: connection table must have 2*radius+1 entries");
  for (double p : conn)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("invalid-params: connection probability outside [0, 1]");
}

std::vector<double> DhrgModel::exponential_radial(int radius, double alpha) {
  if (radius < 0) throw std::invalid_argument("invalid-params: negative radius");
  std::vector<double> table((std::size_t)radius + 1);
  for (int r = 0; r <= radius; ++r)
    table[(std::size_t)r] = std::exp(alpha * (r - radius));
  const double sum = std::accumulate(table.begin(), table.end(), 0.0);
  for (double& w : table) w /= sum;
  return table;
}

std::vector<double> DhrgModel::logistic_conn(int radius, double t, double shift) {
  if (radius < 0) throw std::invalid_argument("invalid-params: negative radius");
  std::vector<double> table((std::size_t)(2 * radius) + 1);
  for (int x = 0; x <= 2 * radius; ++x)
    table[(std::size_t)x] = 1.0 / (1.0 + std::exp(t * x + shift));
  return table;
}

ExpectedStats dhrg_expected_stats(const DhrgModel& model, Grid& grid, RghtStg& stg) {
  model.validate();
  const int R = model.radius;
  std::vector<double> a((std::size_t)R + 1);
  std::vector<double> ring((std::size_t)R + 1);
  for (int r = 0; r <= R; ++r) {
    ring[(std::size_t)r] = grid.ring_size((std::uint32_t)r).get_d();
    a[(std::size_t)r] = model.radial[(std::size_t)r] / ring[(std::size_t)r];
  }
  const double n = static_cast<double>(model.n);
  ExpectedStats out;
  {
    DistanceCounter pairs(stg, TemplateGraph::edge(), R, {EdgeWeight{model.conn, 0}});
    pairs.init_regular(0);
    out.avg_degree = pairs.weighted_aggregate(
        [&](const std::vector<int>& dep, long) {
          return n * a[(std::size_t)dep[0]] * a[(std::size_t)dep[1]];
        });
    out.degree_by_radius.assign((std::size_t)R + 1, 0.0);
    for (int r = 0; r <= R; ++r)
      out.degree_by_radius[(std::size_t)r] = pairs.weighted_aggregate(
          [&](const std::vector<int>& dep, long) {
            if (dep[0] != r) return 0.0;
            return n * a[(std::size_t)dep[1]] / ring[(std::size_t)r];
          });
  }
  const auto triple_weight = [&](const std::vector<int>& dep, long) {
    return a[(std::size_t)dep[0]] * a[(std::size_t)dep[1]] * a[(std::size_t)dep[2]];
  };
  const std::vector<double> ones((std::size_t)(2 * R) + 1, 1.0);
  double wedge = 0.0;
  {
    DistanceCounter open_triples(
        stg, TemplateGraph::triangle(), R,
        {EdgeWeight{model.conn, 0}, EdgeWeight{model.conn, 0}, EdgeWeight{ones, 0}});
    open_triples.init_regular(0);
    wedge = open_triples.weighted_aggregate(triple_weight);
  }
  double closed = 0.0;
  {
    DistanceCounter closed_triples(
        stg, TemplateGraph::triangle(), R,
        {EdgeWeight{model.conn, 0}, EdgeWeight{model.conn, 0}, EdgeWeight{model.conn, 0}});
    closed_triples.init_regular(0);
    closed = closed_triples.weighted_aggregate(triple_weight);
  }
  out.clustering_defined = wedge > 0.0;
  out.clustering = out.clustering_defined ? closed / wedge
                                          : std::numeric_limits<double>::quiet_NaN();
  return out;
}

DhrgInstance::DhrgInstance(DhrgModel model, Grid& grid, RghtStg& stg,
                           std::vector<VertexId> embedding,
                           const std::vector<std::pair<int, int>>& edges)
    : model_(std::move(model)),
      grid_(grid),
      stg_(stg),
      emb_(std::move(embedding)),
      pairs_(stg, validated_radius(model_)) {
  if ((int)emb_.size() != model_.n)
    throw std::invalid_argument("invalid-params: embedding size must equal n");
  for (VertexId pos : emb_) pairs_.add(stg_.vertex_node(pos), 1.0);
  adj_.assign((std::size_t)model_.n, {});
  edge_hist_.assign((std::size_t)(2 * model_.radius) + 1, 0.0);
  edges_.reserve(edges.size());
  for (const auto& [u, w] : edges) {
    if (u < 0 || w < 0 || u >= model_.n || w >= model_.n)
      throw std::invalid_argument("invalid-params: edge endpoint out of range");
    if (u == w) throw std::invalid_argument("invalid-params: self loop");
    edges_.emplace_back(std::min(u, w), std::max(u, w));
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("invalid-params: duplicate edge");
  for (const auto& [u, w] : edges_) {
    adj_[(std::size_t)u].push_back(w);
    adj_[(std::size_t)w].push_back(u);
    const int d = stg_distance(stg_, stg_.vertex_node(emb_[(std::size_t)u]),
                               stg_.vertex_node(emb_[(std::size_t)w]));
    edge_hist_[(std::size_t)d] += 1.0;
  }
}

double DhrgInstance::pair_count(int d) const {
  if (!in_range(d)) return 0.0;
  if (d == 0) return (pairs_.count(0) - model_.n) / 2.0;
  return pairs_.count(d) / 2.0;
}

double DhrgInstance::loglik() const {
  double total = 0.0;
  for (int d = 0; d <= 2 * model_.radius; ++d) {
    const double p = model_.conn[(std::size_t)d];
    const double e = edge_hist_[(std::size_t)d];
    const double rest = pair_count(d) - e;
    if (e > kCountEps) {
      if (p <= 0.0) return -kInf;
      total += e * std::log(p);
    }
    if (rest > kCountEps) {
      if (p >= 1.0) return -kInf;
      total += rest * std::log1p(-p);
    }
  }
  return total;
}

double DhrgInstance::move(int v, VertexId newpos) {
  if (v < 0 || v >= model_.n)
    throw std::invalid_argument("invalid-params: vertex id out of range");
  const StgNode to = stg_.vertex_node(newpos);
  if (stg_.depth0(to) > model_.radius) throw std::out_of_range("out-of-ball");
  if (newpos == emb_[(std::size_t)v]) return 0.0;
  const double before = loglik();
  const StgNode from = stg_.vertex_node(emb_[(std::size_t)v]);
  pairs_.add(from, -1.0);
  pairs_.add(to, 1.0);
  for (const int w : adj_[(std::size_t)v]) {
    const StgNode wn = stg_.vertex_node(emb_[(std::size_t)w]);
    edge_hist_[(std::size_t)stg_distance(stg_, from, wn)] -= 1.0;
    edge_hist_[(std::size_t)stg_distance(stg_, to, wn)] += 1.0;
  }
  emb_[(std::size_t)v] = newpos;
  return loglik() - before;
}

SearchLog DhrgInstance::local_search(long iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SearchLog log;
  log.trace.push_back(loglik());
  for (long it = 0; it < iterations; ++it) {
    const int v = (int)(rng() % (std::uint64_t)model_.n);
    const VertexId from = emb_[(std::size_t)v];
    std::vector<VertexId> cands;
    for (const VertexId nb : grid_.neighbors(from))
      if ((int)grid_.depth(nb) <= model_.radius) cands.push_back(nb);
    if (cands.empty()) continue;
    const VertexId to = cands[rng() % cands.size()];
    const double delta = move(v, to);
    if (delta > 0.0) {
      log.accepted.push_back({it, v, from, to, delta, loglik()});
      log.trace.push_back(loglik());
    } else {
      move(v, from);
    }
  }
  return log;
}

DhrgInstance DhrgInstance::generate(const DhrgModel& model, Grid& grid, RghtStg& stg,
                                    std::uint64_t seed) {
  model.validate();
  const int R = model.radius;
  const int n = model.n;
  std::mt19937_64 rng(seed);
  gmp_randclass ring_rng(gmp_randinit_default);
  ring_rng.seed((unsigned long)(seed ^ 0x9e3779b97f4a7c15ull));

  std::vector<double> cdf(model.radial.size());
  std::partial_sum(model.radial.begin(), model.radial.end(), cdf.begin());
  std::vector<VertexId> emb((std::size_t)n);
  for (int v = 0; v < n; ++v) {
    const double u = unit_interval(rng);
    int r = 0;
    while (r < R && u >= cdf[(std::size_t)r]) ++r;
    const mpz_class idx = ring_rng.get_z_range(grid.ring_size((std::uint32_t)r));
    emb[(std::size_t)v] = grid.ring_vertex((std::uint32_t)r, idx);
  }

  // Pair the vertices: the counter always holds the unprocessed suffix, so
  // each unordered pair is examined exactly once, at its smaller vertex.
  PairCounter pc(stg, R);
  std::unordered_map<VertexId, std::vector<int>> at_pos;
  for (int v = 0; v < n; ++v) {
    pc.add(stg.vertex_node(emb[(std::size_t)v]), 1.0);
    at_pos[emb[(std::size_t)v]].push_back(v);
  }
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < n; ++v) {
    const StgNode vn = stg.vertex_node(emb[(std::size_t)v]);
    pc.add(vn, -1.0);
    std::vector<int>& coincident = at_pos[emb[(std::size_t)v]];
    coincident.erase(coincident.begin());
    {
      const double p = model.conn[0];
      const long long q = (long long)coincident.size();
      if (p > 0.0 && q > 0) {
        long long i = 0;
        while (true) {
          const long long step = geometric_step(rng, p);
          if (step > q - i) break;
          i += step;
          edges.emplace_back(v, coincident[(std::size_t)(i - 1)]);
        }
      }
    }
    const std::vector<double> profile = pc.distance_profile(vn);
    for (int d = 1; d <= 2 * R; ++d) {
      const double p = model.conn[(std::size_t)d];
      const long long q = std::llround(profile[(std::size_t)d]);
      if (p <= 0.0 || q <= 0) continue;
      long long i = 0;
      while (true) {
        const long long step = geometric_step(rng, p);
        if (step > q - i) break;
        i += step;
        const StgNode wn = pc.select_at_distance(vn, d, i);
        long long run = 0;  // ordinal among coincident copies of this position
        while (i - 1 - run >= 1 && pc.select_at_distance(vn, d, i - 1 - run) == wn) ++run;
        const std::vector<int>& bucket = at_pos[stg.left_vertex(wn)];
        edges.emplace_back(v, bucket[(std::size_t)run]);
      }
    }
  }
  return DhrgInstance(model, grid, stg, std::move(emb), edges);
}

}  // namespace hypgrid
