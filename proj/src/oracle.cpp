#include "hypgrid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hypgrid {

BallOracle::BallOracle(Grid& grid, int radius) {
  verts_ = ball_vertices(grid, radius);
  index_.reserve(verts_.size());
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    index_.emplace(verts_[i], static_cast<int>(i));
  }
  adjacency_.resize(verts_.size());
  for (std::size_t i = 0; i < verts_.size(); ++i) {
    for (VertexId w : grid.neighbors(verts_[i])) {
      auto it = index_.find(w);
      if (it != index_.end()) adjacency_[i].push_back(it->second);
    }
  }
}

int BallOracle::index_of(VertexId v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw std::invalid_argument("out-of-ball");
  return it->second;
}

const std::vector<int>& BallOracle::distance_row(VertexId source) {
  const int s = index_of(source);
  auto it = rows_.find(s);
  if (it != rows_.end()) return it->second;
  if (rows_.size() > 4096) rows_.clear();
  std::vector<int> dist(verts_.size(), -1);
  std::deque<int> queue{s};
  dist[s] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int w : adjacency_[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return rows_.emplace(s, std::move(dist)).first->second;
}

int BallOracle::distance(VertexId a, VertexId b) {
  const int d = distance_row(a)[index_of(b)];
  if (d < 0) throw std::runtime_error("ball oracle: disconnected ball");
  return d;
}

std::vector<VertexId> ball_vertices(Grid& grid, int radius) {
  std::vector<VertexId> out{grid.root()};
  for (int k = 1; k <= radius; ++k) {
    const unsigned long size = grid.ring_size(k).get_ui();
    VertexId v = grid.ring_vertex(k, 0);
    for (unsigned long i = 0; i < size; ++i) {
      out.push_back(v);
      if (i + 1 < size) v = grid.succ(v);
    }
  }
  return out;
}

int bfs_distance(Grid& grid, VertexId a, VertexId b, int cap) {
  if (a == b) return 0;
  std::unordered_map<VertexId, int> dist{{a, 0}};
  std::deque<VertexId> queue{a};
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    const int du = dist.at(u);
    if (du >= cap) break;
    for (VertexId w : grid.neighbors(u)) {
      if (dist.emplace(w, du + 1).second) {
        if (w == b) return du + 1;
        queue.push_back(w);
      }
    }
  }
  throw std::runtime_error("bfs-cap-exceeded");
}

std::map<std::vector<int>, double> enumerate_embeddings(
    Grid& grid, int radius, const TemplateGraph& tmpl,
    const std::vector<std::unordered_map<VertexId, double>>& values_by_color) {
  tmpl.validate();
  for (int color : tmpl.colors) {
    if (color < 0 || color >= static_cast<int>(values_by_color.size())) {
      throw std::invalid_argument("invalid-params: template color has no value layer");
    }
  }

  const int k = tmpl.vertex_count;
  std::vector<std::vector<std::pair<VertexId, double>>> supports(k);
  double product_size = 1.0;
  for (int w = 0; w < k; ++w) {
    const auto& layer = values_by_color[tmpl.colors[w]];
    supports[w].assign(layer.begin(), layer.end());
    std::sort(supports[w].begin(), supports[w].end());
    product_size *= static_cast<double>(supports[w].size());
    if (product_size > 1e8) throw std::runtime_error("too-large");
  }

  std::map<std::vector<int>, double> out;
  if (product_size == 0.0) return out;

  BallOracle oracle(grid, radius);
  std::vector<std::size_t> odo(k, 0);
  std::vector<int> key(k + tmpl.edges.size(), 0);
  while (true) {
    double weight = 1.0;
    for (int w = 0; w < k; ++w) weight *= supports[w][odo[w]].second;
    if (weight != 0.0) {
      for (int w = 0; w < k; ++w) {
        key[w] = grid.depth(supports[w][odo[w]].first);
      }
      for (std::size_t e = 0; e < tmpl.edges.size(); ++e) {
        key[k + e] = oracle.distance(supports[tmpl.edges[e].first][odo[tmpl.edges[e].first]].first,
                                     supports[tmpl.edges[e].second][odo[tmpl.edges[e].second]].first);
      }
      out[key] += weight;
    }
    int pos = k - 1;
    while (pos >= 0 && ++odo[pos] == supports[pos].size()) {
      odo[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  for (auto it = out.begin(); it != out.end();) {
    it = it->second == 0.0 ? out.erase(it) : std::next(it);
  }
  return out;
}

std::vector<double> brute_pair_histogram(
    Grid& grid, int radius, const std::vector<std::pair<VertexId, double>>& weighted) {
  BallOracle oracle(grid, radius);
  std::vector<double> hist(2 * radius + 1, 0.0);
  for (const auto& [v, x] : weighted) {
    const std::vector<int>& row = oracle.distance_row(v);
    for (const auto& [w, y] : weighted) {
      hist.at(row[oracle.index_of(w)]) += x * y;
    }
  }
  return hist;
}

double brute_loglik(Grid& grid, int radius, const std::vector<VertexId>& positions,
                    const std::vector<std::pair<int, int>>& edges,
                    const std::vector<double>& p_by_distance) {
  BallOracle oracle(grid, radius);
  const int n = static_cast<int>(positions.size());
  std::vector<double> pair_count(2 * radius + 1, 0.0);
  std::vector<double> edge_count(2 * radius + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<int>& row = oracle.distance_row(positions[i]);
    for (int j = i + 1; j < n; ++j) {
      pair_count.at(row[oracle.index_of(positions[j])]) += 1.0;
    }
  }
  for (const auto& [a, b] : edges) {
    edge_count.at(oracle.distance(positions.at(a), positions.at(b))) += 1.0;
  }
  double total = 0.0;
  for (int d = 0; d <= 2 * radius; ++d) {
    const double p = d < static_cast<int>(p_by_distance.size()) ? p_by_distance[d] : 0.0;
    const double e = edge_count[d];
    const double non = pair_count[d] - edge_count[d];
    if (e > 0.0) {
      if (p <= 0.0) return -std::numeric_limits<double>::infinity();
      total += e * std::log(p);
    }
    if (non > 0.0) {
      if (p >= 1.0) return -std::numeric_limits<double>::infinity();
      total += non * std::log(1.0 - p);
    }
  }
  return total;
}

namespace {

double gamma_power(double gamma, int exponent) {
  if (exponent == 0) return 1.0;
  if (gamma == 0.0) return 0.0;
  return std::pow(gamma, exponent);
}

}  // namespace

std::vector<double> brute_betweenness(Grid& grid, int radius,
                                      const std::vector<VertexId>& positions, double gamma) {
  BallOracle oracle(grid, radius);
  const int n = static_cast<int>(positions.size());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = oracle.index_of(positions[i]);
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    const std::vector<int>& row = oracle.distance_row(positions[i]);
    for (int j = 0; j < n; ++j) dist[i][j] = row[idx[j]];
  }
  std::vector<double> scores(n, 0.0);
  for (int v = 0; v < n; ++v) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        total += gamma_power(gamma, dist[i][v] + dist[v][j] - dist[i][j]);
      }
    }
    scores[v] = total;
  }
  return scores;
}

namespace {

struct BinaryPoint {
  std::vector<std::int64_t> coords;  // d-1 spatial coordinates then the level
  bool operator==(const BinaryPoint& other) const { return coords == other.coords; }
};

struct BinaryPointHash {
  std::size_t operator()(const BinaryPoint& p) const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t c : p.coords) {
      h ^= static_cast<std::size_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

void check_binary_point(int dims, const std::vector<std::int64_t>& p, int depth_cap) {
  if (static_cast<int>(p.size()) != dims) {
    throw std::invalid_argument("invalid-params: point arity mismatch");
  }
  const std::int64_t t = p.back();
  if (t < 0 || t > depth_cap) throw std::invalid_argument("invalid-params: level out of range");
  for (int i = 0; i + 1 < dims; ++i) {
    if (p[i] < 0 || p[i] >= (std::int64_t{1} << t)) {
      throw std::invalid_argument("invalid-params: coordinate out of range");
    }
  }
}

}  // namespace

int binary_box_distance(int dims, const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b, int depth_cap) {
  if (dims < 2) throw std::invalid_argument("invalid-params: dims must be at least 2");
  check_binary_point(dims, a, depth_cap);
  check_binary_point(dims, b, depth_cap);
  BinaryPoint start{a};
  BinaryPoint goal{b};
  if (start == goal) return 0;

  std::unordered_map<BinaryPoint, int, BinaryPointHash> dist{{start, 0}};
  std::deque<BinaryPoint> queue{start};
  auto visit = [&](BinaryPoint&& next, int d) -> int {
    if (dist.emplace(next, d).second) {
      if (next == goal) return d;
      queue.push_back(std::move(next));
    }
    return -1;
  };
  while (!queue.empty()) {
    const BinaryPoint u = queue.front();
    queue.pop_front();
    const int du = dist.at(u);
    const std::int64_t t = u.coords.back();
    for (int i = 0; i + 1 < dims; ++i) {
      for (int step : {-1, 1}) {
        const std::int64_t x = u.coords[i] + step;
        if (x < 0 || x >= (std::int64_t{1} << t)) continue;
        BinaryPoint next = u;
        next.coords[i] = x;
        if (int d = visit(std::move(next), du + 1); d >= 0) return d;
      }
    }
    if (t > 0) {
      BinaryPoint next = u;
      for (int i = 0; i + 1 < dims; ++i) next.coords[i] >>= 1;
      next.coords.back() = t - 1;
      if (int d = visit(std::move(next), du + 1); d >= 0) return d;
    }
    if (t < depth_cap) {
      const int spatial = dims - 1;
      for (int mask = 0; mask < (1 << spatial); ++mask) {
        BinaryPoint next = u;
        for (int i = 0; i < spatial; ++i) {
          next.coords[i] = 2 * u.coords[i] + ((mask >> i) & 1);
        }
        next.coords.back() = t + 1;
        if (int d = visit(std::move(next), du + 1); d >= 0) return d;
      }
    }
  }
  throw std::runtime_error("bfs-cap-exceeded");
}

}  // namespace hypgrid
