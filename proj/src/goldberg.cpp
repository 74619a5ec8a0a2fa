#include "hypgrid/grid.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace hypgrid {
namespace {

/** Point of the triangular lattice, coordinates over the basis (1, w) with
 *  w = exp(i*pi/3).  Multiplication by w maps (u, v) to (-v, u + v). */
struct Eis {
  long u = 0;
  long v = 0;

  friend Eis operator+(Eis a, Eis b) { return {a.u + b.u, a.v + b.v}; }
  friend Eis operator-(Eis a, Eis b) { return {a.u - b.u, a.v - b.v}; }
  friend bool operator==(Eis a, Eis b) { return a.u == b.u && a.v == b.v; }
  friend bool operator<(Eis a, Eis b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  }

  Eis rot() const { return {-v, u + v}; }
};

Eis rot_k(Eis p, int k) {
  for (int i = 0; i < k; ++i) p = p.rot();
  return p;
}

long cross(Eis a, Eis b) { return a.u * b.v - a.v * b.u; }

std::array<Eis, 6> unit_directions() {
  std::array<Eis, 6> dirs;
  dirs[0] = {1, 0};
  for (int i = 1; i < 6; ++i) dirs[i] = dirs[i - 1].rot();
  return dirs;
}

/** The master triangle for parameters (a, b): corners 0, w, w*rot with
 *  w = a + b*omega, refined by the unit lattice.  Point lookups are
 *  precomputed so that per-face work runs on flat arrays. */
struct MasterTriangle {
  std::array<Eis, 3> corner;
  std::vector<Eis> points;         // all lattice points in the closed triangle
  std::map<Eis, int> point_index;  // coordinate -> index into points
  int side_steps = 1;              // primitive steps per side
  std::array<Eis, 3> side_step;    // primitive step along side i

  std::array<int, 3> corner_pos{};           // point index of each corner
  std::vector<std::array<int, 6>> neighbor;  // per point: index of p+dir or -1
  // Per point: (side index, step count from the side's first corner), or
  // (-1, 0) for points not strictly inside a side.
  std::vector<std::pair<int, int>> side_of;
  std::vector<int> boundary;  // points with any out-of-triangle direction

  bool contains(Eis p) const { return point_index.count(p) != 0; }
};

MasterTriangle make_master(long a, long b) {
  MasterTriangle m;
  m.corner[0] = {0, 0};
  m.corner[1] = {a, b};
  m.corner[2] = m.corner[1].rot();
  long g = std::gcd(a, b);
  m.side_steps = static_cast<int>(g);
  for (int s = 0; s < 3; ++s) {
    Eis d = m.corner[(s + 1) % 3] - m.corner[s];
    m.side_step[s] = {d.u / g, d.v / g};
  }
  long lo_u = std::min({m.corner[0].u, m.corner[1].u, m.corner[2].u});
  long hi_u = std::max({m.corner[0].u, m.corner[1].u, m.corner[2].u});
  long lo_v = std::min({m.corner[0].v, m.corner[1].v, m.corner[2].v});
  long hi_v = std::max({m.corner[0].v, m.corner[1].v, m.corner[2].v});
  for (long u = lo_u; u <= hi_u; ++u) {
    for (long v = lo_v; v <= hi_v; ++v) {
      Eis p{u, v};
      bool inside = true;
      for (int s = 0; s < 3 && inside; ++s) {
        Eis c0 = m.corner[s];
        Eis c1 = m.corner[(s + 1) % 3];
        inside = cross(c1 - c0, p - c0) >= 0;
      }
      if (inside) {
        m.point_index[p] = static_cast<int>(m.points.size());
        m.points.push_back(p);
      }
    }
  }

  const std::array<Eis, 6> dirs = unit_directions();
  const int point_count = static_cast<int>(m.points.size());
  m.neighbor.assign(point_count, {});
  m.side_of.assign(point_count, {-1, 0});
  for (int i = 0; i < point_count; ++i) {
    bool out = false;
    for (int d = 0; d < 6; ++d) {
      auto it = m.point_index.find(m.points[i] + dirs[d]);
      m.neighbor[i][d] = it == m.point_index.end() ? -1 : it->second;
      out = out || it == m.point_index.end();
    }
    if (out) m.boundary.push_back(i);
  }
  for (int c = 0; c < 3; ++c) m.corner_pos[c] = m.point_index.at(m.corner[c]);
  for (int i = 0; i < point_count; ++i) {
    Eis p = m.points[i];
    if (p == m.corner[0] || p == m.corner[1] || p == m.corner[2]) continue;
    for (int s = 0; s < 3; ++s) {
      Eis rel = p - m.corner[s];
      Eis step = m.side_step[s];
      if (cross(step, rel) != 0) continue;
      long t = (step.u != 0) ? rel.u / step.u : rel.v / step.v;
      if (t <= 0 || t >= m.side_steps) continue;
      if (!(Eis{step.u * t, step.v * t} == rel)) continue;
      m.side_of[i] = {s, static_cast<int>(t)};
      break;
    }
  }
  return m;
}

/** One triangular face of the base tessellation, corners in ccw order. */
struct Face {
  std::array<VertexId, 3> corner;
  std::uint8_t kind = 0;  // 0 root fan, 1 upward, 2 downward
  std::array<std::uint8_t, 3> ctype{};
};

using EdgeKey = std::pair<VertexId, VertexId>;

EdgeKey edge_key(VertexId a, VertexId b) {
  return {std::min(a, b), std::max(a, b)};
}

/** The subdivided complex built by gluing refined copies of the master
 *  triangle over a ball of the base tessellation. */
struct Refined {
  std::vector<std::vector<int>> adj;
  std::vector<char> is_base;
  std::vector<int> depth;
  std::vector<int> seed;  // dense id of the local face configuration
  int root = -1;
  int depth_limit = 0;  // depths and adjacency are trustworthy below this
};

struct RingStructure {
  std::vector<std::vector<int>> ring;   // ring index -> vertex ids in order
  std::vector<int> owner;               // per vertex
  std::vector<std::vector<int>> owned;  // per vertex, in ring order
  std::vector<int> parent_count;        // per vertex
};

struct BuildFailure : std::runtime_error {
  explicit BuildFailure(const std::string& what) : std::runtime_error(what) {}
};

/** Materializes ring k of the base grid in clockwise order. */
std::vector<VertexId> base_ring(Grid& base, int k) {
  if (k == 0) return {base.root()};
  VertexAddress addr(static_cast<std::size_t>(k), 0);
  VertexId start = base.vertex_at(addr);
  std::vector<VertexId> out;
  VertexId v = start;
  do {
    out.push_back(v);
    v = base.succ(v);
  } while (v != start);
  return out;
}

Refined build_refined(const GridParams& params, int ball_radius,
                      const MasterTriangle& master) {
  Grid base(GridParams{params.q, 1, 0});
  std::vector<std::vector<VertexId>> rings(ball_radius);
  for (int k = 0; k < ball_radius; ++k) rings[k] = base_ring(base, k);

  std::vector<Face> faces;
  std::map<EdgeKey, std::vector<std::pair<int, int>>> edge_faces;
  auto add_face = [&](VertexId a, VertexId b, VertexId c, std::uint8_t kind) {
    int id = static_cast<int>(faces.size());
    faces.push_back(Face{{a, b, c},
                         kind,
                         {static_cast<std::uint8_t>(base.type_of(a)),
                          static_cast<std::uint8_t>(base.type_of(b)),
                          static_cast<std::uint8_t>(base.type_of(c))}});
    const Face& f = faces.back();
    for (int s = 0; s < 3; ++s) {
      edge_faces[edge_key(f.corner[s], f.corner[(s + 1) % 3])].push_back(
          {id, s});
    }
  };
  for (int k = 0; k < ball_radius; ++k) {
    for (VertexId v : rings[k]) {
      std::vector<VertexId> kids = base.children(v);
      if (k == 0) {
        for (std::size_t i = 0; i < kids.size(); ++i) {
          add_face(v, kids[i], kids[(i + 1) % kids.size()], 0);
        }
      } else {
        for (std::size_t i = 0; i + 1 < kids.size(); ++i) {
          add_face(v, kids[i], kids[i + 1], 1);
        }
        add_face(v, kids.back(), base.succ(v), 2);
      }
    }
  }

  Refined rc;
  const int point_count = static_cast<int>(master.points.size());
  const std::size_t face_count = faces.size();
  // Global vertex ids per face and lattice position, flat layout.
  std::vector<int> local(face_count * static_cast<std::size_t>(point_count),
                         -1);
  auto new_vertex = [&](bool base_vertex) {
    rc.adj.emplace_back();
    rc.is_base.push_back(base_vertex ? 1 : 0);
    return static_cast<int>(rc.adj.size()) - 1;
  };
  std::unordered_map<VertexId, int> base_gid;
  std::map<std::pair<EdgeKey, int>, int> side_gid;
  for (std::size_t f = 0; f < face_count; ++f) {
    int* row = &local[f * static_cast<std::size_t>(point_count)];
    for (int i = 0; i < point_count; ++i) {
      int gid = -1;
      bool is_corner = false;
      for (int c = 0; c < 3 && !is_corner; ++c) {
        if (i != master.corner_pos[c]) continue;
        is_corner = true;
        VertexId bv = faces[f].corner[c];
        auto it = base_gid.find(bv);
        if (it == base_gid.end()) {
          gid = new_vertex(true);
          base_gid.emplace(bv, gid);
        } else {
          gid = it->second;
        }
      }
      if (!is_corner) {
        auto [s, t] = master.side_of[i];
        if (s >= 0) {
          VertexId ea = faces[f].corner[s];
          VertexId eb = faces[f].corner[(s + 1) % 3];
          long from_min = (ea < eb) ? t : master.side_steps - t;
          auto key =
              std::make_pair(edge_key(ea, eb), static_cast<int>(from_min));
          auto it = side_gid.find(key);
          if (it == side_gid.end()) {
            gid = new_vertex(false);
            side_gid.emplace(key, gid);
          } else {
            gid = it->second;
          }
        } else {
          gid = new_vertex(false);
        }
      }
      row[i] = gid;
    }
  }

  // Adjacency: push both directions, deduplicate at the end.
  auto add_edge = [&](int x, int y) {
    if (x == y) throw BuildFailure("table-construction-failed: self loop");
    rc.adj[x].push_back(y);
    rc.adj[y].push_back(x);
  };
  for (std::size_t f = 0; f < face_count; ++f) {
    const int* row = &local[f * static_cast<std::size_t>(point_count)];
    for (int i = 0; i < point_count; ++i) {
      for (int d = 0; d < 3; ++d) {
        int j = master.neighbor[i][d];
        if (j >= 0) add_edge(row[i], row[j]);
      }
    }
  }
  const std::array<Eis, 6> dirs = unit_directions();
  for (const auto& [key, refs] : edge_faces) {
    if (refs.size() != 2) continue;
    for (int which = 0; which < 2; ++which) {
      auto [f, s] = refs[which];
      auto [f2, s2] = refs[1 - which];
      VertexId ea = faces[f].corner[s];
      VertexId eb = faces[f].corner[(s + 1) % 3];
      // The neighbouring face traverses the shared side in reverse order.
      if (faces[f2].corner[s2] != eb ||
          faces[f2].corner[(s2 + 1) % 3] != ea) {
        throw BuildFailure("table-construction-failed: face orientation");
      }
      Eis fa = master.corner[s];
      Eis fb = master.corner[(s + 1) % 3];
      Eis fa2 = master.corner[(s2 + 1) % 3];  // image of corner ea in face f2
      Eis fb2 = master.corner[s2];
      int rot = -1;
      for (int k = 0; k < 6; ++k) {
        if (rot_k(fb - fa, k) == fb2 - fa2) {
          rot = k;
          break;
        }
      }
      if (rot < 0) throw BuildFailure("table-construction-failed: gluing");
      const int* row = &local[static_cast<std::size_t>(f) * point_count];
      const int* row2 = &local[static_cast<std::size_t>(f2) * point_count];
      for (int i : master.boundary) {
        Eis p = master.points[i];
        for (int d = 0; d < 6; ++d) {
          if (master.neighbor[i][d] >= 0) continue;
          Eis q2 = fa2 + rot_k(p + dirs[d] - fa, rot);
          auto it = master.point_index.find(q2);
          if (it != master.point_index.end()) {
            add_edge(row[i], row2[it->second]);
          }
        }
      }
    }
  }

  rc.root = base_gid.at(base.root());
  const int n = static_cast<int>(rc.adj.size());
  for (int v = 0; v < n; ++v) {
    auto& a = rc.adj[v];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  rc.depth.assign(n, -1);
  rc.depth[rc.root] = 0;
  std::vector<int> queue{rc.root};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    for (int w : rc.adj[v]) {
      if (rc.depth[w] < 0) {
        rc.depth[w] = rc.depth[v] + 1;
        queue.push_back(w);
      }
    }
  }

  // Local configuration seeds: the sorted list of (face kind, corner base
  // types, position) over a vertex's face incidences pins down its local
  // neighbourhood and makes the later classification converge quickly.
  {
    std::vector<std::pair<int, std::uint32_t>> inc;
    inc.reserve(face_count * static_cast<std::size_t>(point_count));
    for (std::size_t f = 0; f < face_count; ++f) {
      const int* row = &local[f * static_cast<std::size_t>(point_count)];
      const Face& fc = faces[f];
      std::uint32_t face_code = fc.kind;
      for (int c = 0; c < 3; ++c) {
        face_code = (face_code << 4) | fc.ctype[c];
      }
      for (int i = 0; i < point_count; ++i) {
        inc.emplace_back(row[i],
                         (face_code << 8) | static_cast<std::uint32_t>(i));
      }
    }
    std::sort(inc.begin(), inc.end());
    rc.seed.assign(n, -1);
    std::map<std::vector<std::uint32_t>, int> codes;
    std::vector<std::uint32_t> key;
    for (std::size_t at = 0; at < inc.size();) {
      const int v = inc[at].first;
      key.clear();
      while (at < inc.size() && inc[at].first == v) {
        key.push_back(inc[at].second);
        ++at;
      }
      auto it = codes.find(key);
      if (it == codes.end()) it = codes.emplace(key, codes.size()).first;
      rc.seed[v] = it->second;
    }
  }

  int incomplete = std::numeric_limits<int>::max();
  for (int v = 0; v < n; ++v) {
    int expected = rc.is_base[v] ? static_cast<int>(params.q) : 6;
    if (rc.depth[v] < 0) continue;
    if (static_cast<int>(rc.adj[v].size()) != expected) {
      incomplete = std::min(incomplete, rc.depth[v]);
    }
  }
  if (incomplete == std::numeric_limits<int>::max()) {
    throw BuildFailure("table-construction-failed: no boundary found");
  }
  rc.depth_limit = incomplete;  // depths < depth_limit have full adjacency
  return rc;
}

/** Orders rings 0..depth_limit-1 into cycles and derives ownership.
 *  `flip` selects the orientation of ring 1 and thereby of every ring. */
RingStructure build_rings(const Refined& rc, bool flip) {
  RingStructure rs;
  int n = static_cast<int>(rc.adj.size());
  rs.owner.assign(n, -1);
  rs.owned.assign(n, {});
  rs.parent_count.assign(n, 0);
  int max_ring = rc.depth_limit;  // rings 0..max_ring-1 are fully reliable
  if (max_ring < 4) throw BuildFailure("table-construction-failed: shallow");
  rs.ring.resize(max_ring);
  for (int v = 0; v < n; ++v) {
    if (rc.depth[v] >= 0 && rc.depth[v] < max_ring) {
      rs.ring[rc.depth[v]].push_back(v);
    }
  }
  auto same_ring_neighbors = [&](int v) {
    std::vector<int> out;
    for (int w : rc.adj[v]) {
      if (rc.depth[w] == rc.depth[v]) out.push_back(w);
    }
    return out;
  };
  auto walk_cycle = [&](int start, int next, std::size_t size) {
    std::vector<int> order{start, next};
    while (order.size() < size) {
      auto nb = same_ring_neighbors(order.back());
      if (nb.size() != 2) {
        throw BuildFailure("table-construction-failed: ring degree");
      }
      int prev = order[order.size() - 2];
      order.push_back(nb[0] == prev ? nb[1] : nb[0]);
    }
    auto nb = same_ring_neighbors(order.back());
    if (nb.size() != 2 || (nb[0] != start && nb[1] != start)) {
      throw BuildFailure("table-construction-failed: ring not closed");
    }
    return order;
  };

  // Ring 1: both orientations are valid at this point; `flip` picks one.
  {
    int start = *std::min_element(rs.ring[1].begin(), rs.ring[1].end());
    auto nb = same_ring_neighbors(start);
    if (nb.size() != 2) {
      throw BuildFailure("table-construction-failed: ring degree");
    }
    rs.ring[1] = walk_cycle(start, flip ? nb[1] : nb[0], rs.ring[1].size());
  }
  // Deeper rings: orientation propagated through a shared child.
  for (int k = 1; k + 1 < max_ring; ++k) {
    int v = rs.ring[k][0];
    int sv = rs.ring[k][1 % rs.ring[k].size()];
    auto children_of = [&](int x) {
      std::set<int> out;
      for (int w : rc.adj[x]) {
        if (rc.depth[w] == k + 1) out.insert(w);
      }
      return out;
    };
    std::set<int> cv = children_of(v);
    std::set<int> csv = children_of(sv);
    std::vector<int> shared;
    std::set_intersection(cv.begin(), cv.end(), csv.begin(), csv.end(),
                          std::back_inserter(shared));
    if (shared.size() != 1) {
      throw BuildFailure("table-construction-failed: shared child");
    }
    int w = shared[0];
    std::vector<int> wnb = same_ring_neighbors(w);
    if (wnb.size() != 2) {
      throw BuildFailure("table-construction-failed: ring degree");
    }
    bool first_in = cv.count(wnb[0]) != 0;
    bool second_in = cv.count(wnb[1]) != 0;
    if (first_in == second_in) {
      throw BuildFailure("table-construction-failed: child arc");
    }
    // w is the rightmost child of v, so its predecessor is v's other child
    // and the cycle continues away from it.
    int next = first_in ? wnb[1] : wnb[0];
    rs.ring[k + 1] = walk_cycle(w, next, rs.ring[k + 1].size());
  }

  // Ownership: a vertex with two parents belongs to the later parent.
  for (int k = 1; k < max_ring; ++k) {
    std::map<int, int> pos;  // ring k-1 positions
    for (std::size_t i = 0; i < rs.ring[k - 1].size(); ++i) {
      pos[rs.ring[k - 1][i]] = static_cast<int>(i);
    }
    for (int w : rs.ring[k]) {
      std::vector<int> parents;
      for (int u : rc.adj[w]) {
        if (rc.depth[u] == k - 1) parents.push_back(u);
      }
      rs.parent_count[w] = static_cast<int>(parents.size());
      if (k == 1) {
        if (parents.size() != 1) {
          throw BuildFailure("table-construction-failed: ring-1 parents");
        }
        rs.owner[w] = parents[0];
        continue;
      }
      if (parents.size() == 1) {
        rs.owner[w] = parents[0];
      } else if (parents.size() == 2) {
        int pa = pos.at(parents[0]);
        int pb = pos.at(parents[1]);
        int m = static_cast<int>(rs.ring[k - 1].size());
        if ((pa + 1) % m == pb) {
          rs.owner[w] = parents[1];
        } else if ((pb + 1) % m == pa) {
          rs.owner[w] = parents[0];
        } else {
          throw BuildFailure("table-construction-failed: parent adjacency");
        }
      } else {
        throw BuildFailure("table-construction-failed: parent count");
      }
    }
    for (int w : rs.ring[k]) rs.owned[rs.owner[w]].push_back(w);
  }
  // Rotate each owned list so that it starts at the two-parent child; ring
  // order within the list is preserved because each list is a contiguous arc.
  for (int k = 1; k + 1 < max_ring; ++k) {
    std::map<int, int> pos;
    for (std::size_t i = 0; i < rs.ring[k + 1].size(); ++i) {
      pos[rs.ring[k + 1][i]] = static_cast<int>(i);
    }
    for (int v : rs.ring[k]) {
      auto& list = rs.owned[v];
      if (list.empty()) {
        throw BuildFailure("table-construction-failed: empty child word");
      }
      std::sort(list.begin(), list.end(),
                [&](int x, int y) { return pos.at(x) < pos.at(y); });
      // A contiguous arc may wrap around the ring; rotate to the gap.
      std::size_t break_at = 0;
      int breaks = 0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        int cur = pos.at(list[i]);
        int prev = pos.at(list[(i + list.size() - 1) % list.size()]);
        int m = static_cast<int>(rs.ring[k + 1].size());
        if ((prev + 1) % m != cur) {
          break_at = i;
          ++breaks;
        }
      }
      if (breaks > 1) {
        throw BuildFailure("table-construction-failed: child arc split");
      }
      std::rotate(list.begin(), list.begin() + break_at, list.end());
      if (rs.parent_count[list.front()] != 2) {
        throw BuildFailure("table-construction-failed: leftmost child");
      }
    }
  }
  return rs;
}

struct Classification {
  std::vector<int> color;  // final color per vertex, -1 where undefined
  int domain_depth = 0;    // colors valid for depths <= domain_depth
};

/** Refines the seed colors until the owned-child words are consistent.  Each
 *  round shrinks the trusted depth range by one. */
Classification classify(const Refined& rc, const RingStructure& rs) {
  Classification out;
  int n = static_cast<int>(rc.adj.size());
  int top = rc.depth_limit - 1;  // deepest depth with full adjacency
  std::vector<int> color(n, -1);
  {
    std::map<std::tuple<int, int>, int> seed;
    for (int d = 0; d <= top; ++d) {
      for (int v : rs.ring[d]) {
        std::tuple<int, int> key{d == 0 ? -1 : rc.seed[v],
                                 rs.parent_count[v]};
        auto it = seed.find(key);
        if (it == seed.end()) it = seed.emplace(key, seed.size()).first;
        color[v] = it->second;
      }
    }
  }
  int domain = top;
  for (int round = 0;; ++round) {
    int next_domain = top - 1 - round;
    if (next_domain < 2) {
      throw BuildFailure("table-construction-failed: refinement depth");
    }
    std::vector<int> next(n, -1);
    std::map<std::vector<int>, int> codes;
    bool split = false;
    std::map<int, int> old_to_new;
    std::vector<int> sig;
    for (int d = 0; d <= next_domain; ++d) {
      for (int v : rs.ring[d]) {
        sig.clear();
        sig.push_back(color[v]);
        for (int c : rs.owned[v]) sig.push_back(color[c]);
        auto it = codes.find(sig);
        if (it == codes.end()) it = codes.emplace(sig, codes.size()).first;
        next[v] = it->second;
        auto prev = old_to_new.find(color[v]);
        if (prev == old_to_new.end()) {
          old_to_new[color[v]] = next[v];
        } else if (prev->second != next[v]) {
          split = true;
        }
      }
    }
    if (!split) {
      out.color = std::move(color);
      out.domain_depth = domain;
      return out;
    }
    color = std::move(next);
    domain = next_domain;
  }
}

/** Extracts a table from final colors, renumbering classes by first use. */
TypeTable extract_table(const Refined& rc, const RingStructure& rs,
                        const Classification& cls, std::size_t rotation,
                        std::vector<int>* color_to_type_out) {
  // Words readable for representatives with children inside the domain.
  std::map<int, std::vector<int>> word;  // color -> child color word
  std::map<int, bool> two_parents;
  for (int d = cls.domain_depth - 1; d >= 0; --d) {
    for (int v : rs.ring[d]) {
      int c = cls.color[v];
      if (word.count(c)) continue;
      std::vector<int> w;
      for (int ch : rs.owned[v]) {
        if (cls.color[ch] < 0) {
          throw BuildFailure("table-construction-failed: word domain");
        }
        w.push_back(cls.color[ch]);
      }
      word[c] = std::move(w);
      two_parents[c] = rs.parent_count[v] == 2;
    }
  }
  int root_color = cls.color[rc.root];
  std::vector<int> root_word = word.at(root_color);
  std::rotate(root_word.begin(), root_word.begin() + rotation,
              root_word.end());

  std::map<int, TypeId> renumber;
  std::vector<int> order;
  renumber[root_color] = 0;
  order.push_back(root_color);
  for (std::size_t head = 0; head < order.size(); ++head) {
    int c = order[head];
    const std::vector<int>& w = (c == root_color) ? root_word : word.at(c);
    for (int ch : w) {
      if (!renumber.count(ch)) {
        if (!word.count(ch)) {
          throw BuildFailure("table-construction-failed: missing class word");
        }
        renumber[ch] = static_cast<TypeId>(order.size());
        order.push_back(ch);
      }
    }
  }

  TypeTable table;
  table.root_type = 0;
  table.child_word.resize(order.size());
  table.two_parents.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    int c = order[i];
    const std::vector<int>& w = (c == root_color) ? root_word : word.at(c);
    for (int ch : w) {
      table.child_word[i].push_back(renumber.at(ch));
    }
    table.two_parents[i] = two_parents.at(c);
  }
  if (color_to_type_out) {
    int max_color = 0;
    for (const auto& [c, t] : renumber) max_color = std::max(max_color, c);
    color_to_type_out->assign(max_color + 1, -1);
    for (const auto& [c, t] : renumber) (*color_to_type_out)[c] = t;
  }
  return table;
}

/** Merges types with identical expansion behaviour (coarsest partition stable
 *  under the child words), renumbered in first-use order from the root. */
TypeTable minimize_table(const TypeTable& in, std::vector<TypeId>* map_out) {
  const std::size_t n = in.child_word.size();
  std::vector<int> cls(n);
  {
    std::map<std::tuple<int, int, std::size_t>, int> init;
    for (std::size_t t = 0; t < n; ++t) {
      std::tuple<int, int, std::size_t> key{t == in.root_type ? 1 : 0,
                                            in.two_parents[t] ? 1 : 0,
                                            in.child_word[t].size()};
      auto it = init.find(key);
      if (it == init.end()) it = init.emplace(key, init.size()).first;
      cls[t] = it->second;
    }
  }
  for (;;) {
    std::map<std::vector<int>, int> codes;
    std::vector<int> next(n);
    std::vector<int> sig;
    for (std::size_t t = 0; t < n; ++t) {
      sig.clear();
      sig.push_back(cls[t]);
      for (TypeId c : in.child_word[t]) sig.push_back(cls[c]);
      auto it = codes.find(sig);
      if (it == codes.end()) it = codes.emplace(sig, codes.size()).first;
      next[t] = it->second;
    }
    if (next == cls) break;
    cls = std::move(next);
  }
  std::map<int, TypeId> renumber;
  std::vector<TypeId> rep;  // representative input type per output class
  renumber[cls[in.root_type]] = 0;
  rep.push_back(static_cast<TypeId>(in.root_type));
  for (std::size_t head = 0; head < rep.size(); ++head) {
    for (TypeId c : in.child_word[rep[head]]) {
      if (!renumber.count(cls[c])) {
        renumber[cls[c]] = static_cast<TypeId>(rep.size());
        rep.push_back(c);
      }
    }
  }
  TypeTable out;
  out.root_type = 0;
  out.child_word.resize(rep.size());
  out.two_parents.resize(rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) {
    for (TypeId c : in.child_word[rep[i]]) {
      out.child_word[i].push_back(renumber.at(cls[c]));
    }
    out.two_parents[i] = in.two_parents[rep[i]];
  }
  if (map_out) {
    map_out->assign(n, 0);
    for (std::size_t t = 0; t < n; ++t) {
      (*map_out)[t] = renumber.at(cls[t]);
    }
  }
  return out;
}

/** True if `pattern` occurs in `text` read circularly (equal lengths). */
bool circular_match(const std::vector<int>& pattern,
                    const std::vector<int>& text) {
  const std::size_t n = pattern.size();
  if (text.size() != n) return false;
  if (n == 0) return true;
  // Knuth-Morris-Pratt over the doubled text.
  std::vector<std::size_t> fail(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t j = fail[i - 1];
    while (j > 0 && pattern[i] != pattern[j]) j = fail[j - 1];
    if (pattern[i] == pattern[j]) ++j;
    fail[i] = j;
  }
  std::size_t j = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    int c = text[i < n ? i : i - n];
    while (j > 0 && c != pattern[j]) j = fail[j - 1];
    if (c == pattern[j]) ++j;
    if (j == n) return true;
  }
  return false;
}

/** Checks the extracted table against the subdivided complex: ring words (as
 *  circular sequences) and vertex degrees over the trusted depth range. */
void validate_against_refinement(const TypeTable& table, const Refined& rc,
                                 const RingStructure& rs,
                                 const Classification& cls,
                                 const std::vector<int>& color_to_class) {
  constexpr int kMaxDepth = 12;
  constexpr std::size_t kMaxRing = 2000000;
  auto class_of = [&](int u) {
    int c = u < 0 ? -1 : cls.color[u];
    if (c < 0 || c >= static_cast<int>(color_to_class.size()) ||
        color_to_class[c] < 0) {
      throw BuildFailure("table-construction-failed: untyped ring vertex");
    }
    return color_to_class[c];
  };

  std::vector<int> word{static_cast<int>(table.root_type)};
  const int depth_cap = std::min(cls.domain_depth, kMaxDepth);
  for (int k = 1; k <= depth_cap; ++k) {
    std::vector<int> next;
    for (int t : word) {
      for (TypeId c : table.child_word[static_cast<TypeId>(t)]) {
        next.push_back(static_cast<int>(c));
      }
    }
    word = std::move(next);
    if (word.size() > kMaxRing) break;
    if (word.size() != rs.ring[k].size()) {
      throw BuildFailure("table-construction-failed: ring size mismatch");
    }
    std::vector<int> have;
    have.reserve(rs.ring[k].size());
    for (int u : rs.ring[k]) have.push_back(class_of(u));
    if (!circular_match(word, have)) {
      throw BuildFailure("table-construction-failed: ring word mismatch");
    }
  }
  // Degrees in the complex match the degrees the types imply (parents plus
  // two ring neighbours plus children, or the root fan).
  for (int k = 0; k + 1 < std::min(cls.domain_depth, kMaxDepth); ++k) {
    for (int u : rs.ring[k]) {
      const TypeId t = static_cast<TypeId>(class_of(u));
      const std::size_t implied =
          k == 0 ? table.child_word[table.root_type].size()
                 : (table.two_parents[t] ? 2 : 1) + 2 +
                       table.child_word[t].size() + 1;
      if (rc.adj[u].size() != implied) {
        throw BuildFailure("table-construction-failed: degree mismatch");
      }
    }
  }
}

/** Builds the canonical table for one ball radius: both ring orientations and
 *  every root-word rotation, minimized, smallest serialization wins. */
TypeTable candidate_for(const GridParams& params, int ball_radius,
                        const MasterTriangle& master) {
  Refined rc = build_refined(params, ball_radius, master);

  std::string best_text;
  TypeTable best;
  RingStructure best_rs;
  Classification best_cls;
  std::vector<int> best_class_map;
  std::string last_error;
  for (int flip = 0; flip < 2; ++flip) {
    try {
      RingStructure rs = build_rings(rc, flip != 0);
      Classification cls = classify(rc, rs);
      std::size_t root_len = rs.owned[rc.root].size();
      for (std::size_t rot = 0; rot < root_len; ++rot) {
        std::vector<int> c2t;
        TypeTable raw = extract_table(rc, rs, cls, rot, &c2t);
        std::vector<TypeId> t2min;
        TypeTable reduced = minimize_table(raw, &t2min);
        std::string text = canonical_table_serialization(reduced);
        if (best_text.empty() || text < best_text) {
          best_text = text;
          best = reduced;
          best_rs = rs;
          best_cls = cls;
          best_class_map.assign(c2t.size(), -1);
          for (std::size_t c = 0; c < c2t.size(); ++c) {
            if (c2t[c] >= 0) {
              best_class_map[c] = static_cast<int>(t2min[c2t[c]]);
            }
          }
        }
      }
    } catch (const BuildFailure& e) {
      last_error = e.what();
    }
  }
  if (best_text.empty()) {
    throw BuildFailure(last_error.empty()
                           ? "table-construction-failed: no candidate"
                           : last_error);
  }
  validate_against_refinement(best, rc, best_rs, best_cls, best_class_map);
  best.validate();
  return best;
}

TypeTable three_type_table(int q) {
  TypeTable table;
  table.root_type = 0;
  table.child_word.resize(3);
  table.two_parents = {false, false, true};
  table.child_word[0].assign(q, 1);
  table.child_word[1].assign(q - 4, 1);
  table.child_word[1][0] = 2;
  table.child_word[2].assign(q - 5, 1);
  table.child_word[2][0] = 2;
  table.validate();
  return table;
}

/** Number of vertices of the base {3,q} ball of the given radius. */
std::uint64_t base_ball_size(int q, int radius) {
  std::uint64_t c1 = static_cast<std::uint64_t>(q), c2 = 0, total = 1;
  for (int k = 1; k <= radius; ++k) {
    total += c1 + c2;
    std::uint64_t n1 = c1 * static_cast<std::uint64_t>(q - 5) +
                       c2 * static_cast<std::uint64_t>(q - 6);
    std::uint64_t n2 = c1 + c2;
    c1 = n1;
    c2 = n2;
  }
  return total;
}

}  // namespace

std::string canonical_table_serialization(const TypeTable& table) {
  std::ostringstream os;
  os << "root=" << table.root_type << ";";
  for (std::size_t t = 0; t < table.child_word.size(); ++t) {
    os << "t" << t << (table.two_parents[t] ? "^" : "-") << ":";
    for (TypeId c : table.child_word[t]) os << c << ",";
    os << ";";
  }
  return os.str();
}

TypeTable build_subdivision_table(const GridParams& raw) {
  GridParams params = canonicalize_params(raw);
  MasterTriangle master = make_master(params.a, params.b);
  std::string last_error = "table-construction-failed";
  for (int ball_radius = 5; ball_radius <= 9; ++ball_radius) {
    // Lattice points over all faces of the base ball; refuse sizes that
    // would exhaust memory rather than letting the build die.
    const std::uint64_t face_estimate =
        base_ball_size(params.q, ball_radius) +
        base_ball_size(params.q, ball_radius - 1);
    if (face_estimate * master.points.size() > 6000000) {
      last_error += ": refinement too large";
      break;
    }
    try {
      return candidate_for(params, ball_radius, master);
    } catch (const BuildFailure& e) {
      last_error = e.what();
    }
  }
  throw std::runtime_error(last_error + ": no stable table for q=" +
                           std::to_string(params.q) +
                           " a=" + std::to_string(params.a) +
                           " b=" + std::to_string(params.b));
}

TypeTable build_type_table(const GridParams& raw) {
  GridParams params = canonicalize_params(raw);
  if (params.a == 1 && params.b == 0) return three_type_table(params.q);
  // Tables are deterministic per parameter triple; building one costs a
  // subdivided-complex construction, so reuse results process-wide.
  static std::map<std::tuple<int, long, long>, TypeTable> cache;
  static std::map<std::tuple<int, long, long>, std::string> failures;
  const std::tuple<int, long, long> key{params.q, static_cast<long>(params.a),
                                        static_cast<long>(params.b)};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (auto it = failures.find(key); it != failures.end()) {
    throw std::runtime_error(it->second);
  }
  try {
    TypeTable table = build_subdivision_table(params);
    cache.emplace(key, table);
    return table;
  } catch (const std::exception& e) {
    failures.emplace(key, e.what());
    throw;
  }
}

}  // namespace hypgrid
