#include "hypgrid/stg.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hypgrid {

namespace {

constexpr std::int64_t kRghtTag = 1;
constexpr std::int64_t kBinaryTag = 2;

std::uint64_t pack_segment(const StgNode& s) {
  return (static_cast<std::uint64_t>(s.f[2]) << 8) | static_cast<std::uint64_t>(s.f[3]);
}

}  // namespace

int stg_distance(SegmentTree& stg, StgNode a, StgNode b) {
  int ka = stg.depth0(a);
  int kb = stg.depth0(b);
  int up_a = 0;
  int up_b = 0;
  while (ka > kb) {
    a = stg.parent(a);
    --ka;
    ++up_a;
  }
  while (kb > ka) {
    b = stg.parent(b);
    --kb;
    ++up_b;
  }
  int best = INT_MAX;
  while (true) {
    if (auto base = stg.near(a, b)) {
      best = std::min(best, up_a + up_b + *base);
    }
    if (ka == 0) break;
    a = stg.parent(a);
    b = stg.parent(b);
    --ka;
    ++up_a;
    ++up_b;
  }
  if (best == INT_MAX) throw std::logic_error("invalid-params: nodes of unrelated trees");
  return best;
}

// ---------------------------------------------------------------------------
// RghtStg
// ---------------------------------------------------------------------------

RghtStg::RghtStg(Grid& grid, int d_bound)
    : grid_(grid), ring_distance_(grid), d_(d_bound), len_cap_(d_bound + 1) {
  if (d_bound < 1) throw std::runtime_error("invalid-params: d_bound must be positive");
}

StgNode RghtStg::vertex_node(VertexId v) { return segment(v, 1); }

StgNode RghtStg::segment(VertexId left, std::int64_t length) {
  const std::uint32_t ring = grid_.depth(left);
  if (length < 1 || length > len_cap_) {
    throw std::runtime_error("invalid-params: segment length out of range");
  }
  const mpz_class& rs = grid_.ring_size(ring);
  if (rs < length) throw std::runtime_error("invalid-params: segment longer than its ring");
  if (rs == length && ring > 0) {
    left = grid_.ring_vertex(ring, 0);  // whole ring: one canonical start
  }
  StgNode s;
  s.f[0] = kRghtTag;
  s.f[1] = static_cast<std::int64_t>(ring);
  s.f[2] = static_cast<std::int64_t>(left);
  s.f[3] = length;
  return s;
}

VertexId RghtStg::left_vertex(const StgNode& s) const {
  return static_cast<VertexId>(s.f[2]);
}

std::int64_t RghtStg::length_of(const StgNode& s) const { return s.f[3]; }

std::vector<VertexId> RghtStg::segment_members(const StgNode& s) {
  std::vector<VertexId> out;
  VertexId v = left_vertex(s);
  for (std::int64_t i = 0; i < s.f[3]; ++i) {
    out.push_back(v);
    if (i + 1 < s.f[3]) v = grid_.succ(v);
  }
  return out;
}

StgNode RghtStg::root() { return segment(grid_.root(), 1); }

int RghtStg::depth0(const StgNode& s) { return static_cast<int>(s.f[1]); }

StgNode RghtStg::parent(const StgNode& s) {
  const int ring = depth0(s);
  if (ring == 0) throw std::runtime_error("invalid-params: root has no parent");
  if (ring == 1) return root();
  const VertexId left = left_vertex(s);
  const VertexId right = grid_.advance(left, static_cast<std::uint32_t>(s.f[3] - 1));
  const VertexId pl = grid_.parents(left).first;
  const VertexId pr = grid_.parents(right).second;
  const auto off = grid_.offset_between(pl, pr, static_cast<std::uint32_t>(len_cap_ + 2));
  if (!off || static_cast<std::int64_t>(*off) + 1 > len_cap_) {
    throw std::logic_error("invalid-params: ancestor segment too wide");
  }
  return segment(pl, static_cast<std::int64_t>(*off) + 1);
}

bool RghtStg::is_vertex(const StgNode& s) { return s.f[3] == 1; }

std::optional<int> RghtStg::near(const StgNode& s, const StgNode& t) {
  if (s.f[0] != kRghtTag || t.f[0] != kRghtTag || s.f[1] != t.f[1]) return std::nullopt;
  if (s.f[1] == 0) return 0;
  const std::uint32_t cap = static_cast<std::uint32_t>(len_cap_ - 1 + d_);
  long gap = LONG_MAX;
  if (auto off = grid_.offset_between(left_vertex(s), left_vertex(t), cap)) {
    gap = std::min(gap, std::max<long>(0, static_cast<long>(*off) - (s.f[3] - 1)));
  }
  if (auto off = grid_.offset_between(left_vertex(t), left_vertex(s), cap)) {
    gap = std::min(gap, std::max<long>(0, static_cast<long>(*off) - (t.f[3] - 1)));
  }
  if (gap > d_) return std::nullopt;
  return base_distance(s, t);
}

int RghtStg::base_distance(const StgNode& s, const StgNode& t) {
  std::uint64_t a = pack_segment(s);
  std::uint64_t b = pack_segment(t);
  if (a > b) std::swap(a, b);
  auto& slot = base_memo_[a];
  if (auto it = slot.find(b); it != slot.end()) return it->second;
  int best = INT_MAX;
  for (VertexId x : segment_members(s)) {
    for (VertexId y : segment_members(t)) {
      best = std::min(best, ring_distance_(x, y));
      if (best == 0) break;
    }
    if (best == 0) break;
  }
  slot[b] = best;
  return best;
}

std::vector<std::pair<StgNode, int>> RghtStg::neighbors(const StgNode& s) {
  std::vector<std::pair<StgNode, int>> out;
  const int ring = depth0(s);
  if (ring == 0) {
    out.emplace_back(root(), 0);
    return out;
  }
  const mpz_class& rs = grid_.ring_size(static_cast<std::uint32_t>(ring));
  const long back = d_ + len_cap_ - 1;
  const long window = back + static_cast<long>(s.f[3]) + d_;
  long positions;
  VertexId start;
  if (rs <= window) {
    positions = rs.get_si();
    start = grid_.ring_vertex(static_cast<std::uint32_t>(ring), 0);
  } else {
    positions = window;
    start = left_vertex(s);
    for (long i = 0; i < back; ++i) start = grid_.pred(start);
  }
  const std::int64_t max_len = rs < len_cap_ ? rs.get_si() : len_cap_;
  std::set<StgNode> seen;
  VertexId p = start;
  for (long i = 0; i < positions; ++i) {
    for (std::int64_t len = 1; len <= max_len; ++len) {
      StgNode t = segment(p, len);
      if (!seen.insert(t).second) continue;
      if (auto base = near(s, t)) out.emplace_back(t, *base);
    }
    p = grid_.succ(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StgNode> RghtStg::child_segments(const StgNode& s) {
  const int ring = depth0(s);
  std::vector<VertexId> lefts;
  std::vector<VertexId> rights;
  if (ring == 0) {
    for (std::uint32_t i = 0; i < grid_.word_len(grid_.root()); ++i) {
      lefts.push_back(grid_.owned_child(grid_.root(), i));
    }
    rights = lefts;
  } else {
    for (VertexId v : segment_members(s)) {
      for (std::uint32_t i = 1; i < grid_.word_len(v); ++i) {
        lefts.push_back(grid_.owned_child(v, i));
      }
      lefts.push_back(grid_.owned_child(grid_.succ(v), 0));
      for (std::uint32_t i = 0; i < grid_.word_len(v); ++i) {
        rights.push_back(grid_.owned_child(v, i));
      }
    }
  }
  const mpz_class& child_rs = grid_.ring_size(static_cast<std::uint32_t>(ring) + 1);
  const std::int64_t max_len = child_rs < len_cap_ ? child_rs.get_si() : len_cap_;
  std::set<StgNode> seen;
  std::vector<StgNode> out;
  for (VertexId x : lefts) {
    for (VertexId y : rights) {
      const auto off = grid_.offset_between(x, y, static_cast<std::uint32_t>(max_len - 1));
      if (!off) continue;
      StgNode c = segment(x, static_cast<std::int64_t>(*off) + 1);
      if (!seen.insert(c).second) continue;
      if (parent(c) == s) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int RghtStg::neighbor_bound() const {
  return (2 * d_ + 2 * len_cap_) * len_cap_;
}

std::string RghtStg::tuple_class_key(const std::vector<StgNode>& tuple) {
  if (tuple.empty()) throw std::runtime_error("invalid-params: empty tuple");
  const int k = depth0(tuple.front());
  for (const StgNode& s : tuple) {
    if (s.f[0] != kRghtTag || depth0(s) != k) {
      throw std::runtime_error("invalid-params: tuple nodes must share one ring");
    }
  }
  std::ostringstream key;
  key << "r|" << k;
  if (k == 0) {
    key << "|root*" << tuple.size();
    return key.str();
  }
  const std::size_t c = tuple.size();
  const long w_bound = static_cast<long>(c + 1) * (d_ + len_cap_) + len_cap_ + 2;
  const mpz_class& rs = grid_.ring_size(static_cast<std::uint32_t>(k));
  const bool small_ring = rs <= 4 * w_bound + 2;

  // Base component: on small rings the choice minimizing the forward spread is
  // rotation invariant; on large rings the unique all-seeing component works.
  std::vector<long> offs(c, 0);
  std::size_t base = c;
  if (small_ring) {
    const long n = rs.get_si();
    std::vector<long> idx(c, -1);
    VertexId v = grid_.ring_vertex(static_cast<std::uint32_t>(k), 0);
    for (long pos = 0; pos < n; ++pos, v = grid_.succ(v)) {
      for (std::size_t i = 0; i < c; ++i) {
        if (left_vertex(tuple[i]) == v) idx[i] = pos;
      }
    }
    long best_spread = LONG_MAX;
    for (std::size_t i = 0; i < c; ++i) {
      long spread = 0;
      for (std::size_t j = 0; j < c; ++j) {
        spread = std::max(spread, (idx[j] - idx[i] + n) % n);
      }
      if (spread < best_spread) {
        best_spread = spread;
        base = i;
      }
    }
    for (std::size_t j = 0; j < c; ++j) {
      offs[j] = (idx[j] - idx[base] + rs.get_si()) % rs.get_si();
    }
  } else {
    for (std::size_t i = 0; i < c && base == c; ++i) {
      std::vector<long> cand(c, -1);
      bool ok = true;
      for (std::size_t j = 0; j < c; ++j) {
        const auto off = grid_.offset_between(left_vertex(tuple[i]), left_vertex(tuple[j]),
                                              static_cast<std::uint32_t>(2 * w_bound));
        if (!off) {
          ok = false;
          break;
        }
        cand[j] = static_cast<long>(*off);
      }
      if (ok) {
        base = i;
        offs = cand;
      }
    }
    if (base == c) throw std::runtime_error("invalid-params: tuple too spread for a class key");
  }

  long span = 0;
  for (std::size_t j = 0; j < c; ++j) {
    key << "|o" << offs[j] << "l" << tuple[j].f[3];
    span = std::max(span, offs[j] + static_cast<long>(tuple[j].f[3]));
  }

  const long margin = d_ + 4;
  const auto emit_word = [&](VertexId from, long len, const mpz_class& ring_sz) {
    if (ring_sz <= len) {
      len = ring_sz.get_si();
      key << "w";  // wraps: the whole ring, read from `from`
    } else {
      key << "l";
    }
    VertexId v = from;
    for (long i = 0; i < len; ++i, v = grid_.succ(v)) {
      key << static_cast<int>(grid_.type_of(v)) << ",";
    }
  };
  const auto emit_phase = [&](VertexId v) {
    std::uint32_t slot = grid_.owner_index(v);
    if (grid_.depth(v) == 1) {
      // The q-fold rotation symmetry makes root-child slots equivalent up to
      // one period of the first-ring word.
      const std::uint32_t period = std::max<std::uint32_t>(
          1, static_cast<std::uint32_t>(grid_.word_len(grid_.root())) /
                 static_cast<std::uint32_t>(grid_.params().q));
      slot %= period;
    }
    key << "p" << (grid_.table().two_parents[grid_.type_of(v)] ? 1 : 0) << "." << slot;
  };

  VertexId pad_left = left_vertex(tuple[base]);
  long pad_len = span + 2 * margin;
  {
    long steps = margin;
    if (rs <= pad_len) {
      pad_len = rs.get_si();
      steps = std::min<long>(margin, rs.get_si() - 1);
    }
    for (long i = 0; i < steps; ++i) pad_left = grid_.pred(pad_left);
  }
  key << "|W";
  emit_word(pad_left, pad_len, rs);

  // Two ancestor levels pin down the structure shortest near-routes can climb
  // through; below the tuple everything is determined by the level-k word.
  VertexId lo = pad_left;
  long lo_len = std::min<long>(pad_len, rs <= pad_len ? rs.get_si() : pad_len);
  int level = k;
  for (int step = 1; step <= 2; ++step) {
    key << "|A" << step;
    if (level - 1 < 0) break;
    if (level - 1 == 0) {
      key << "R";
      emit_phase(lo);
      break;
    }
    const VertexId hi_left = grid_.parents(lo).first;
    const VertexId lo_right = grid_.advance(lo, static_cast<std::uint32_t>(lo_len - 1));
    const VertexId hi_right = grid_.parents(lo_right).second;
    const mpz_class& hi_rs = grid_.ring_size(static_cast<std::uint32_t>(level - 1));
    const std::uint32_t cap = static_cast<std::uint32_t>(
        hi_rs <= lo_len + 4 ? hi_rs.get_si() - 1 : lo_len + 4);
    const auto off = grid_.offset_between(hi_left, hi_right, cap);
    if (!off) throw std::logic_error("invalid-params: ancestor span too wide for a class key");
    long hi_len = static_cast<long>(*off) + 1;
    if (hi_rs <= hi_len) hi_len = hi_rs.get_si();
    emit_word(hi_left, hi_len, hi_rs);
    emit_phase(lo);
    lo = hi_left;
    lo_len = hi_len;
    --level;
  }

  key << "|D";
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      if (auto base_d = near(tuple[i], tuple[j])) {
        key << *base_d << ",";
      } else {
        key << "x,";
      }
    }
  }
  return key.str();
}

// ---------------------------------------------------------------------------
// BinaryStg
// ---------------------------------------------------------------------------

BinaryStg::BinaryStg(int dims) : dims_(dims) {
  if (dims < 2 || dims > 6) throw std::runtime_error("invalid-params: dims must be in [2, 6]");
}

StgNode BinaryStg::point(const std::vector<std::int64_t>& coords, std::int64_t level) {
  if (static_cast<int>(coords.size()) != dims_ - 1) {
    throw std::runtime_error("invalid-params: expected dims-1 coordinates");
  }
  if (level < 0 || level > 62) throw std::runtime_error("invalid-params: level out of range");
  StgNode s;
  s.f[0] = kBinaryTag;
  s.f[1] = dims_;
  s.f[2] = level;
  for (int i = 0; i < dims_ - 1; ++i) {
    if (coords[i] < 0 || coords[i] >= (std::int64_t{1} << level)) {
      throw std::runtime_error("invalid-params: coordinate outside the level box");
    }
    s.f[3 + i] = coords[i];
  }
  return s;
}

std::vector<std::int64_t> BinaryStg::coords_of(const StgNode& s) const {
  return std::vector<std::int64_t>(s.f.begin() + 3, s.f.begin() + 3 + (dims_ - 1));
}

StgNode BinaryStg::root() { return point(std::vector<std::int64_t>(dims_ - 1, 0), 0); }

int BinaryStg::depth0(const StgNode& s) { return static_cast<int>(s.f[2]); }

StgNode BinaryStg::parent(const StgNode& s) {
  if (s.f[2] == 0) throw std::runtime_error("invalid-params: root has no parent");
  StgNode p = s;
  p.f[2] -= 1;
  for (int i = 0; i < dims_ - 1; ++i) p.f[3 + i] >>= 1;
  return p;
}

std::optional<int> BinaryStg::near(const StgNode& s, const StgNode& t) {
  if (s.f[0] != kBinaryTag || t.f[0] != kBinaryTag || s.f[2] != t.f[2]) return std::nullopt;
  for (int i = 0; i < dims_ - 1; ++i) {
    const std::int64_t diff = s.f[3 + i] - t.f[3 + i];
    if (diff < -4 || diff > 4) return std::nullopt;
  }
  return base_distance(s, t);
}

int BinaryStg::base_distance(const StgNode& s, const StgNode& t) {
  if (s == t) return 0;
  const StgNode a = std::min(s, t);
  const StgNode b = std::max(s, t);
  auto& slot = base_memo_[a];
  if (auto it = slot.find(b); it != slot.end()) return it->second;

  // Breadth-first search on levels <= level(a): any route through deeper
  // levels projects onto an equally short route above, so the answer is exact.
  const int cap = base_distance_bound();
  const std::int64_t window = cap + 5;
  const std::int64_t top = a.f[2];
  const auto admissible = [&](const StgNode& n) {
    const std::int64_t shift = top - n.f[2];
    for (int i = 0; i < dims_ - 1; ++i) {
      const std::int64_t ca = a.f[3 + i] >> shift;
      const std::int64_t cb = b.f[3 + i] >> shift;
      const std::int64_t x = n.f[3 + i];
      if (std::llabs(x - ca) > window && std::llabs(x - cb) > window) return false;
    }
    return true;
  };

  std::unordered_set<StgNode, StgNodeHash> visited{a};
  std::deque<std::pair<StgNode, int>> queue{{a, 0}};
  while (!queue.empty()) {
    auto [node, dist] = queue.front();
    queue.pop_front();
    if (node == b) {
      slot[b] = dist;
      return dist;
    }
    if (dist == cap) continue;
    std::vector<StgNode> next;
    for (int i = 0; i < dims_ - 1; ++i) {
      for (int step : {-1, 1}) {
        StgNode n = node;
        n.f[3 + i] += step;
        if (n.f[3 + i] >= 0 && n.f[3 + i] < (std::int64_t{1} << node.f[2])) next.push_back(n);
      }
    }
    if (node.f[2] > 0) next.push_back(parent(node));
    if (node.f[2] < top) {
      for (StgNode child : child_segments(node)) next.push_back(child);
    }
    for (const StgNode& n : next) {
      if (!admissible(n)) continue;
      if (visited.insert(n).second) queue.emplace_back(n, dist + 1);
    }
  }
  throw std::logic_error("bfs-cap-exceeded");
}

std::vector<std::pair<StgNode, int>> BinaryStg::neighbors(const StgNode& s) {
  std::vector<std::pair<StgNode, int>> out;
  const std::int64_t bound = std::int64_t{1} << s.f[2];
  std::vector<std::int64_t> delta(dims_ - 1, -4);
  while (true) {
    StgNode t = s;
    bool ok = true;
    for (int i = 0; i < dims_ - 1; ++i) {
      t.f[3 + i] += delta[i];
      if (t.f[3 + i] < 0 || t.f[3 + i] >= bound) {
        ok = false;
        break;
      }
    }
    if (ok) out.emplace_back(t, base_distance(s, t));
    int i = 0;
    for (; i < dims_ - 1; ++i) {
      if (++delta[i] <= 4) break;
      delta[i] = -4;
    }
    if (i == dims_ - 1) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<StgNode> BinaryStg::child_segments(const StgNode& s) {
  std::vector<StgNode> out;
  const int n = dims_ - 1;
  for (int bits = 0; bits < (1 << n); ++bits) {
    StgNode c = s;
    c.f[2] += 1;
    for (int i = 0; i < n; ++i) {
      c.f[3 + i] = 2 * s.f[3 + i] + ((bits >> i) & 1);
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int BinaryStg::neighbor_bound() const {
  int b = 1;
  for (int i = 0; i < dims_ - 1; ++i) b *= 9;
  return b;
}

std::string BinaryStg::tuple_class_key(const std::vector<StgNode>& tuple) {
  std::ostringstream key;
  key << "b|" << dims_;
  for (const StgNode& s : tuple) {
    key << "|" << s.f[2];
    for (int i = 0; i < dims_ - 1; ++i) key << "," << s.f[3 + i];
  }
  return key.str();
}

}  // namespace hypgrid
