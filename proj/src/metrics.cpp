#include "hypgrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypgrid {

namespace {

std::uint64_t pair_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

int RingDistance::operator()(VertexId a, VertexId b) {
  if (a == b) return 0;
  const std::uint64_t key = pair_key(a, b);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  const int depth = static_cast<int>(grid_.depth(a));
  if (static_cast<int>(grid_.depth(b)) != depth) {
    throw std::invalid_argument("invalid-params: RingDistance requires same-ring vertices");
  }

  // Route through lower rings: drop to a parent of each endpoint (2 edges)
  // plus the exact distance between those parents.  Evaluated first so the
  // arc walks below can be capped by it.
  int best = std::numeric_limits<int>::max();
  if (depth == 1) {
    best = 2;  // both endpoints are adjacent to the root
  } else {
    auto [pa1, pa2] = grid_.parents(a);
    auto [pb1, pb2] = grid_.parents(b);
    for (VertexId pa : {pa1, pa2}) {
      for (VertexId pb : {pb1, pb2}) {
        best = std::min(best, 2 + (*this)(pa, pb));
      }
    }
  }

  for (int dir = 0; dir < 2; ++dir) {
    const VertexId from = dir == 0 ? a : b;
    const VertexId to = dir == 0 ? b : a;
    if (auto arc = grid_.offset_between(from, to, best - 1)) {
      best = std::min(best, static_cast<int>(*arc));
    }
  }

  memo_.emplace(key, best);
  return best;
}

namespace {

struct SegmentPair {
  VertexId v1;
  VertexId v2;
  int offset;
  int ring;
};

}  // namespace

int compute_d_bound(Grid& grid) {
  const GridParams& params = grid.params();
  const int ring_cap = 10 * (2 * params.a + params.b + params.q);
  RingDistance dist(grid);

  // Types guaranteed to keep producing an extra child in every generation:
  // the greatest set of types owning two or more children whose owned word
  // again contains such a type.
  const TypeTable& table = grid.table();
  std::vector<char> persistent(table.type_count(), 0);
  for (std::size_t t = 0; t < table.type_count(); ++t) {
    persistent[t] = table.child_word[t].size() >= 2 ? 1 : 0;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t t = 0; t < table.type_count(); ++t) {
      if (!persistent[t]) continue;
      bool keeps = false;
      for (TypeId c : table.child_word[t]) keeps = keeps || persistent[c];
      if (!keeps) {
        persistent[t] = 0;
        changed = true;
      }
    }
  }

  std::deque<SegmentPair> work;
  const std::vector<VertexId> ring1 = grid.children(grid.root());
  const int q = static_cast<int>(ring1.size());
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      work.push_back({ring1[i], ring1[j], (j - i + q) % q, 1});
    }
  }

  int bound = 0;
  std::set<std::string> seen;
  while (!work.empty()) {
    const SegmentPair item = work.front();
    work.pop_front();
    if (item.ring > ring_cap) {
      throw std::runtime_error("bound-search-overflow");
    }

    // Witness check: the arc from v1 to v2 is shorter than every route
    // through lower rings.
    if (item.offset >= 1) {
      int lower;
      if (item.ring == 1) {
        lower = 2;
      } else {
        auto [pa1, pa2] = grid.parents(item.v1);
        auto [pb1, pb2] = grid.parents(item.v2);
        lower = std::numeric_limits<int>::max();
        for (VertexId pa : {pa1, pa2}) {
          for (VertexId pb : {pb1, pb2}) {
            lower = std::min(lower, 2 + dist(pa, pb));
          }
        }
      }
      if (item.offset < lower) bound = std::max(bound, item.offset);
    }

    // Pruning rule: if any interior vertex keeps producing an extra child in
    // every generation, the descendant arcs grow by at least two per
    // generation while the distance grows by at most two, so descending
    // cannot produce witnesses.
    bool marked = false;
    int interior_width = 0;
    {
      VertexId u = item.v1;
      for (int t = 1; t < item.offset && !marked; ++t) {
        u = grid.succ(u);
        if (persistent[grid.type_of(u)]) {
          marked = true;
        } else {
          interior_width += static_cast<int>(grid.word_len(u));
        }
      }
    }
    if (marked) continue;

    // Pruning rule: segments with identical type sequence and identical
    // distances v1..pred(v2) and v1..v2 have identical descendants.
    {
      std::ostringstream sig;
      sig << item.offset << ':';
      VertexId u = item.v1;
      sig << grid.type_of(u);
      for (int t = 0; t < item.offset; ++t) {
        u = grid.succ(u);
        sig << ',' << grid.type_of(u);
      }
      sig << ':' << dist(item.v1, item.v2);
      sig << ':' << (item.offset >= 1 ? dist(item.v1, grid.pred(item.v2)) : 0);
      if (!seen.insert(sig.str()).second) continue;
    }

    const int wl1 = static_cast<int>(grid.word_len(item.v1));
    const int wl2 = static_cast<int>(grid.word_len(item.v2));
    const bool diagonal = item.offset == 0;
    // A diagonal pair descends to every ordered pair of children of the same
    // vertex, including the deeper diagonals; those are the only source of
    // sibling pairs, so restricting them would leave pairs unexplored.
    const int i_end = diagonal ? wl1 : wl1 - 1;
    for (int i = 0; i <= i_end; ++i) {
      const VertexId w1 = i < wl1
                              ? grid.owned_child(item.v1, static_cast<std::uint32_t>(i))
                              : grid.owned_child(grid.succ(item.v1), 0);
      const int j_begin = diagonal ? i : 1;
      for (int j = j_begin; j <= wl2; ++j) {
        const VertexId w2 = j < wl2
                                ? grid.owned_child(item.v2, static_cast<std::uint32_t>(j))
                                : grid.owned_child(grid.succ(item.v2), 0);
        const int child_offset = diagonal ? j - i : (wl1 - i) + interior_width + j;
        work.push_back({w1, w2, child_offset, item.ring + 1});
      }
    }
  }
  return bound;
}

double growth_constant(const TypeTable& table) {
  const std::size_t n = table.child_word.size();
  // Types reachable on rings (the root type never recurs in child words).
  std::vector<char> reachable(n, 0);
  std::vector<TypeId> stack;
  for (TypeId t : table.child_word[table.root_type]) {
    if (!reachable[t]) {
      reachable[t] = 1;
      stack.push_back(t);
    }
  }
  while (!stack.empty()) {
    const TypeId t = stack.back();
    stack.pop_back();
    for (TypeId c : table.child_word[t]) {
      if (!reachable[c]) {
        reachable[c] = 1;
        stack.push_back(c);
      }
    }
  }

  std::vector<double> x(n, 0.0);
  for (TypeId t : table.child_word[table.root_type]) x[t] += 1.0;

  double lambda = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    std::vector<double> next(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      if (!reachable[t] || x[t] == 0.0) continue;
      for (TypeId c : table.child_word[t]) next[c] += x[t];
    }
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    if (norm == 0.0) return 0.0;
    const double prev_norm = std::accumulate(x.begin(), x.end(), 0.0);
    const double estimate = norm / prev_norm;
    for (double& value : next) value /= norm;
    x = std::move(next);
    if (iter > 10 && std::abs(estimate - lambda) <= 1e-13 * std::max(1.0, estimate)) {
      return estimate;
    }
    lambda = estimate;
  }
  return lambda;
}

double growth_constant(const Grid& grid) { return growth_constant(grid.table()); }

}  // namespace hypgrid
