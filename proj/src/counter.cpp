#include "hypgrid/counter.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace hypgrid {
namespace {

constexpr long kExpOffset = 512;  // bias of the 12-bit exponent field

}  // namespace

DistanceCounter::DistanceCounter(SegmentTree& stg, TemplateGraph tmpl, int radius)
    : stg_(stg), tmpl_(std::move(tmpl)), radius_(radius) {
  tmpl_.validate();
  if (radius_ < 0 || radius_ > 31)
    throw std::invalid_argument("invalid-params: radius must be in [0, 31]");
  touched_by_level_.assign(static_cast<std::size_t>(radius_) + 1, {});
  dirty_by_level_.assign(static_cast<std::size_t>(radius_) + 1, {});
  build_subgraphs();
}

DistanceCounter::DistanceCounter(SegmentTree& stg, TemplateGraph tmpl, int radius,
                                 std::vector<EdgeWeight> weights)
    : DistanceCounter(stg, std::move(tmpl), radius) {
  folding_ = true;
  weights_ = std::move(weights);
  if (weights_.size() != tmpl_.edges.size())
    throw std::invalid_argument("invalid-params: one edge weight per template edge required");
  for (const EdgeWeight& w : weights_) {
    if (w.table.empty() && w.exponent_sign == 0)
      throw std::invalid_argument("invalid-params: edge weight rule unspecified");
    if (!w.table.empty() && static_cast<int>(w.table.size()) < 2 * radius_ + 1)
      throw std::invalid_argument(
          "invalid-params: edge weight table must cover distances up to 2R");
  }
}

void DistanceCounter::build_subgraphs() {
  const int n = tmpl_.vertex_count;
  const int m = static_cast<int>(tmpl_.edges.size());
  for (std::uint32_t vmask = 1; vmask < (1u << n); ++vmask) {
    std::uint32_t within = 0;
    for (int j = 0; j < m; ++j) {
      const auto [a, b] = tmpl_.edges[static_cast<std::size_t>(j)];
      if ((vmask >> a & 1u) && (vmask >> b & 1u)) within |= 1u << j;
    }
    std::uint32_t emask = within;
    while (true) {
      std::array<int, 4> dsu{0, 1, 2, 3};
      auto find = [&](int x) {
        while (dsu[static_cast<std::size_t>(x)] != x)
          x = dsu[static_cast<std::size_t>(x)] =
              dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
        return x;
      };
      for (int j = 0; j < m; ++j)
        if (emask >> j & 1u) {
          const auto [a, b] = tmpl_.edges[static_cast<std::size_t>(j)];
          dsu[static_cast<std::size_t>(find(a))] = find(b);
        }
      int root = -1;
      bool connected = true;
      for (int v = 0; v < n; ++v)
        if (vmask >> v & 1u) {
          if (root < 0) root = find(v);
          else if (find(v) != root) { connected = false; break; }
        }
      if (connected) {
        Subgraph D;
        D.vmask = vmask;
        D.emask = emask;
        D.vslot.assign(static_cast<std::size_t>(n), -1);
        D.eslot.assign(static_cast<std::size_t>(m), -1);
        for (int v = 0; v < n; ++v)
          if (vmask >> v & 1u) {
            D.vslot[static_cast<std::size_t>(v)] = static_cast<int>(D.verts.size());
            D.verts.push_back(v);
          }
        for (int j = 0; j < m; ++j)
          if (emask >> j & 1u) {
            D.eslot[static_cast<std::size_t>(j)] = static_cast<int>(D.edges.size());
            D.edges.push_back(j);
          }
        const int nw = static_cast<int>(D.verts.size());
        D.fill_orders.resize(static_cast<std::size_t>(nw));
        for (int s0 = 0; s0 < nw; ++s0) {
          std::array<bool, 4> placed{};
          placed[static_cast<std::size_t>(s0)] = true;
          std::vector<std::pair<int, std::vector<int>>> order;
          for (int step = 1; step < nw; ++step) {
            int pick = -1;
            std::vector<int> nbrs;
            for (int i = 0; i < nw && pick < 0; ++i) {
              if (placed[static_cast<std::size_t>(i)]) continue;
              nbrs.clear();
              for (int j : D.edges) {
                const auto [a, b] = tmpl_.edges[static_cast<std::size_t>(j)];
                const int ia = D.vslot[static_cast<std::size_t>(a)];
                const int ib = D.vslot[static_cast<std::size_t>(b)];
                if (ia == i && placed[static_cast<std::size_t>(ib)]) nbrs.push_back(ib);
                if (ib == i && placed[static_cast<std::size_t>(ia)]) nbrs.push_back(ia);
              }
              if (!nbrs.empty()) pick = i;
            }
            placed[static_cast<std::size_t>(pick)] = true;
            order.emplace_back(pick, nbrs);
          }
          D.fill_orders[static_cast<std::size_t>(s0)] = std::move(order);
        }
        sub_index_[static_cast<std::uint64_t>(vmask) | (static_cast<std::uint64_t>(emask) << 32)] =
            static_cast<int>(subs_.size());
        subs_.push_back(std::move(D));
      }
      if (emask == 0) break;
      emask = (emask - 1) & within;
    }
    if (sub_index_.count(static_cast<std::uint64_t>(vmask) |
                         (static_cast<std::uint64_t>(within) << 32)))
      ++induced_count_;
  }
  full_sub_ = subgraph_id((1u << n) - 1u, m == 0 ? 0u : (1u << m) - 1u);
}

int DistanceCounter::subgraph_id(std::uint32_t vmask, std::uint32_t emask) const {
  const auto it =
      sub_index_.find(static_cast<std::uint64_t>(vmask) | (static_cast<std::uint64_t>(emask) << 32));
  if (it == sub_index_.end()) throw std::logic_error("internal: subgraph registry miss");
  return it->second;
}

int DistanceCounter::induced_subgraph_count() const { return induced_count_; }

const std::vector<StgNode>& DistanceCounter::children_of(const StgNode& s) {
  auto [it, inserted] = child_cache_.try_emplace(s);
  if (inserted) it->second = stg_.child_segments(s);
  return it->second;
}

const std::vector<StgNode>& DistanceCounter::neighbors_of(const StgNode& s) {
  auto [it, inserted] = nbr_cache_.try_emplace(s);
  if (inserted) {
    for (const auto& [node, dist] : stg_.neighbors(s)) it->second.push_back(node);
  }
  return it->second;
}

std::optional<int> DistanceCounter::near_cached(const StgNode& a, const StgNode& b) {
  const std::array<StgNode, 2> key = a <= b ? std::array<StgNode, 2>{a, b}
                                            : std::array<StgNode, 2>{b, a};
  auto [it, inserted] = near_cache_.try_emplace(key, -2);
  if (it->second == -2) {
    const auto nd = stg_.near(key[0], key[1]);
    it->second = nd ? *nd : -1;
  }
  if (it->second < 0) return std::nullopt;
  return it->second;
}

bool DistanceCounter::supported(const StgNode& s) const {
  return touched_.find(s) != touched_.end();
}

double DistanceCounter::value_of(int color, const StgNode& v) const {
  const auto it = values_.find(v);
  if (it != values_.end()) return it->second[static_cast<std::size_t>(color)];
  if (background_ && color == background_color_) return 1.0;
  return 0.0;
}

void DistanceCounter::fold_edge(int edge_idx, int dist, double& val, long& exponent) const {
  const EdgeWeight& w = weights_[static_cast<std::size_t>(edge_idx)];
  if (!w.table.empty()) val *= w.table[static_cast<std::size_t>(dist)];
  else exponent += static_cast<long>(w.exponent_sign) * dist;
}

std::uint64_t DistanceCounter::pack_full(const Subgraph& D, const int* depths,
                                         const int* dists) const {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < D.verts.size(); ++i)
    k = (k << 6) | static_cast<std::uint64_t>(depths[i]);
  for (std::size_t j = 0; j < D.edges.size(); ++j)
    k = (k << 6) | static_cast<std::uint64_t>(dists[j]);
  return k;
}

std::uint64_t DistanceCounter::pack_fold(const Subgraph& D, const int* depths,
                                         long exponent) const {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < D.verts.size(); ++i)
    k = (k << 6) | static_cast<std::uint64_t>(depths[i]);
  const long biased = exponent + kExpOffset;
  if (biased < 0 || biased > 0xFFF) throw std::logic_error("internal: exponent field overflow");
  return (k << 12) | static_cast<std::uint64_t>(biased);
}

void DistanceCounter::unpack_into(const Subgraph& S, std::uint64_t key, const Subgraph& D,
                                  int* depths, int* dists, long& exponent) const {
  if (folding_) {
    exponent = static_cast<long>(key & 0xFFF) - kExpOffset;
    key >>= 12;
  } else {
    for (int j = static_cast<int>(S.edges.size()) - 1; j >= 0; --j) {
      dists[D.eslot[static_cast<std::size_t>(S.edges[static_cast<std::size_t>(j)])]] =
          static_cast<int>(key & 63u);
      key >>= 6;
    }
  }
  for (int i = static_cast<int>(S.verts.size()) - 1; i >= 0; --i) {
    depths[D.vslot[static_cast<std::size_t>(S.verts[static_cast<std::size_t>(i)])]] =
        static_cast<int>(key & 63u);
    key >>= 6;
  }
}

void DistanceCounter::accumulate_combo(const Subgraph& D, unsigned umask,
                                       const std::vector<int>& pend,
                                       const std::array<StgNode, 4>& childs,
                                       const std::array<int, 6>& base_near, int ell, double factor,
                                       const ChildReader& read, DMap& out) {
  const int ne = static_cast<int>(D.edges.size());
  // Edges whose relation survives to the child level: both endpoints still
  // descending and the chosen child segments are near each other.
  std::uint32_t ewmask = 0;
  for (int j = 0; j < ne; ++j) {
    const auto [a, b] = tmpl_.edges[static_cast<std::size_t>(D.edges[static_cast<std::size_t>(j)])];
    const int ia = D.vslot[static_cast<std::size_t>(a)];
    const int ib = D.vslot[static_cast<std::size_t>(b)];
    if ((umask >> ia & 1u) || (umask >> ib & 1u)) continue;
    if (near_cached(childs[static_cast<std::size_t>(ia)], childs[static_cast<std::size_t>(ib)]))
      ewmask |= 1u << j;
  }

  std::array<int, 4> dsu{0, 1, 2, 3};
  auto find = [&](int x) {
    while (dsu[static_cast<std::size_t>(x)] != x)
      x = dsu[static_cast<std::size_t>(x)] =
          dsu[static_cast<std::size_t>(dsu[static_cast<std::size_t>(x)])];
    return x;
  };
  for (int j = 0; j < ne; ++j)
    if (ewmask >> j & 1u) {
      const auto [a, b] =
          tmpl_.edges[static_cast<std::size_t>(D.edges[static_cast<std::size_t>(j)])];
      dsu[static_cast<std::size_t>(find(D.vslot[static_cast<std::size_t>(a)]))] =
          find(D.vslot[static_cast<std::size_t>(b)]);
    }

  struct Comp {
    const Subgraph* sg = nullptr;
    std::array<StgNode, 4> segs{};
    const DMap* dm = nullptr;
  };
  std::array<Comp, 4> comps;
  std::array<int, 4> comp_index{-1, -1, -1, -1};
  std::array<std::uint32_t, 4> cvm{};
  std::array<std::uint32_t, 4> cem{};
  std::size_t ncomp = 0;
  for (int i : pend) {
    const int r = find(i);
    if (comp_index[static_cast<std::size_t>(r)] < 0)
      comp_index[static_cast<std::size_t>(r)] = static_cast<int>(ncomp++);
    cvm[static_cast<std::size_t>(comp_index[static_cast<std::size_t>(r)])] |=
        1u << D.verts[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < ne; ++j)
    if (ewmask >> j & 1u) {
      const auto [a, b] =
          tmpl_.edges[static_cast<std::size_t>(D.edges[static_cast<std::size_t>(j)])];
      cem[static_cast<std::size_t>(
          comp_index[static_cast<std::size_t>(find(D.vslot[static_cast<std::size_t>(a)]))])] |=
          1u << D.edges[static_cast<std::size_t>(j)];
    }
  for (std::size_t c = 0; c < ncomp; ++c) {
    Comp& comp = comps[c];
    const int cid = subgraph_id(cvm[c], cem[c]);
    comp.sg = &subs_[static_cast<std::size_t>(cid)];
    std::size_t pos = 0;
    for (int v : comp.sg->verts)
      comp.segs[pos++] = childs[static_cast<std::size_t>(D.vslot[static_cast<std::size_t>(v)])];
    comp.dm = read(cid, comp.segs);
    if (comp.dm == nullptr || comp.dm->empty()) return;
  }

  int depths[4] = {0, 0, 0, 0};
  int dists[6] = {0, 0, 0, 0, 0, 0};
  const int nw = static_cast<int>(D.verts.size());
  for (int i = 0; i < nw; ++i)
    if (umask >> i & 1u) depths[i] = ell;

  const auto emit = [&](double val, long exponent) {
    for (int j = 0; j < ne; ++j) {
      if (ewmask >> j & 1u) continue;
      const auto [a, b] =
          tmpl_.edges[static_cast<std::size_t>(D.edges[static_cast<std::size_t>(j)])];
      const int df = depths[D.vslot[static_cast<std::size_t>(a)]] +
                     depths[D.vslot[static_cast<std::size_t>(b)]] - 2 * ell +
                     base_near[static_cast<std::size_t>(j)];
      if (df > 2 * radius_) return;  // unreachable: graph distances stay within 2R
      if (folding_) fold_edge(D.edges[static_cast<std::size_t>(j)], df, val, exponent);
      else dists[j] = df;
    }
    if (val == 0.0) return;
    out[folding_ ? pack_fold(D, depths, exponent) : pack_full(D, depths, dists)] += val;
  };

  const auto rec = [&](const auto& self, std::size_t c, double val, long exponent) -> void {
    if (c == ncomp) {
      emit(val, exponent);
      return;
    }
    for (const auto& [key, cval] : *comps[c].dm) {
      long ce = 0;
      unpack_into(*comps[c].sg, key, D, depths, dists, ce);
      self(self, c + 1, val * cval, exponent + ce);
    }
  };
  rec(rec, 0, factor, 0);
}

DistanceCounter::DMap DistanceCounter::compute_tuple(int sub_id, const std::array<StgNode, 4>& u,
                                                     const ChildReader& read,
                                                     bool restrict_support) {
  const Subgraph& D = subs_[static_cast<std::size_t>(sub_id)];
  const int nw = static_cast<int>(D.verts.size());
  const int ne = static_cast<int>(D.edges.size());
  const int ell = stg_.depth0(u[0]);
  DMap out;

  std::array<int, 6> base_near{};
  for (int j = 0; j < ne; ++j) {
    const auto [a, b] = tmpl_.edges[static_cast<std::size_t>(D.edges[static_cast<std::size_t>(j)])];
    const auto nd = near_cached(u[static_cast<std::size_t>(D.vslot[static_cast<std::size_t>(a)])],
                                u[static_cast<std::size_t>(D.vslot[static_cast<std::size_t>(b)])]);
    if (!nd) return out;
    base_near[static_cast<std::size_t>(j)] = *nd;
  }

  std::array<std::vector<StgNode>, 4> restricted;
  for (unsigned umask = 0; umask < (1u << nw); ++umask) {
    double factor = 1.0;
    bool ok = true;
    for (int i = 0; i < nw && ok; ++i) {
      if (!(umask >> i & 1u)) continue;
      if (!stg_.is_vertex(u[static_cast<std::size_t>(i)])) { ok = false; break; }
      const double v = value_of(tmpl_.colors[static_cast<std::size_t>(
                                    D.verts[static_cast<std::size_t>(i)])],
                                u[static_cast<std::size_t>(i)]);
      if (v == 0.0) ok = false;
      else factor *= v;
    }
    if (!ok) continue;

    std::vector<int> pend;
    for (int i = 0; i < nw; ++i)
      if (!(umask >> i & 1u)) pend.push_back(i);

    if (pend.empty()) {
      int depths[4] = {ell, ell, ell, ell};
      if (folding_) {
        double val = factor;
        long exponent = 0;
        for (int j = 0; j < ne; ++j)
          fold_edge(D.edges[static_cast<std::size_t>(j)], base_near[static_cast<std::size_t>(j)],
                    val, exponent);
        if (val != 0.0) out[pack_fold(D, depths, exponent)] += val;
      } else {
        int dists[6] = {0, 0, 0, 0, 0, 0};
        for (int j = 0; j < ne; ++j) dists[j] = base_near[static_cast<std::size_t>(j)];
        out[pack_full(D, depths, dists)] += factor;
      }
      continue;
    }
    if (ell + 1 > radius_) continue;

    std::array<const std::vector<StgNode>*, 4> opts{};
    bool feasible = true;
    for (int i : pend) {
      const std::vector<StgNode>& ch = children_of(u[static_cast<std::size_t>(i)]);
      if (restrict_support) {
        auto& bucket = restricted[static_cast<std::size_t>(i)];
        bucket.clear();
        for (const StgNode& c : ch)
          if (supported(c)) bucket.push_back(c);
        opts[static_cast<std::size_t>(i)] = &bucket;
      } else {
        opts[static_cast<std::size_t>(i)] = &ch;
      }
      if (opts[static_cast<std::size_t>(i)]->empty()) { feasible = false; break; }
    }
    if (!feasible) continue;

    const int np = static_cast<int>(pend.size());
    std::array<std::size_t, 4> idx{};
    std::array<StgNode, 4> childs{};
    while (true) {
      for (int t = 0; t < np; ++t)
        childs[static_cast<std::size_t>(pend[static_cast<std::size_t>(t)])] =
            (*opts[static_cast<std::size_t>(pend[static_cast<std::size_t>(t)])])
                [idx[static_cast<std::size_t>(t)]];
      accumulate_combo(D, umask, pend, childs, base_near, ell, factor, read, out);
      int t = np - 1;
      while (t >= 0 && ++idx[static_cast<std::size_t>(t)] ==
                           opts[static_cast<std::size_t>(pend[static_cast<std::size_t>(t)])]->size()) {
        idx[static_cast<std::size_t>(t)] = 0;
        --t;
      }
      if (t < 0) break;
    }
  }
  return out;
}

std::string DistanceCounter::class_store_key(int sub_id, const std::array<StgNode, 4>& u) {
  const TupleKey tk{static_cast<std::uint32_t>(sub_id), u};
  if (const auto it = ckey_cache_.find(tk); it != ckey_cache_.end()) return it->second;
  std::vector<StgNode> nodes(subs_[static_cast<std::size_t>(sub_id)].verts.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = u[i];
  std::string key = "S" + std::to_string(sub_id) + "|" + stg_.tuple_class_key(nodes);
  ckey_cache_.emplace(tk, key);
  return key;
}

const DistanceCounter::DMap* DistanceCounter::class_value(int sub_id,
                                                          const std::array<StgNode, 4>& u) {
  const std::string key = class_store_key(sub_id, u);
  if (const auto it = class_store_.find(key); it != class_store_.end()) return &it->second;
  DMap dm = compute_tuple(
      sub_id, u,
      [this](int s, const std::array<StgNode, 4>& t) { return class_value(s, t); }, false);
  return &class_store_.emplace(key, std::move(dm)).first->second;
}

const DistanceCounter::DMap* DistanceCounter::read_instance(int sub_id,
                                                            const std::array<StgNode, 4>& u) {
  const auto it = store_.find(TupleKey{static_cast<std::uint32_t>(sub_id), u});
  if (it != store_.end()) return &it->second;
  if (background_) return class_value(sub_id, u);
  return nullptr;
}

std::vector<DistanceCounter::TupleKey> DistanceCounter::tuples_at(const StgNode& anchor) {
  std::unordered_set<TupleKey, TupleKeyHash> seen;
  for (std::size_t sid = 0; sid < subs_.size(); ++sid) {
    const Subgraph& D = subs_[sid];
    const int nw = static_cast<int>(D.verts.size());
    for (int s0 = 0; s0 < nw; ++s0) {
      std::array<StgNode, 4> segs{};
      segs[static_cast<std::size_t>(s0)] = anchor;
      const auto& order = D.fill_orders[static_cast<std::size_t>(s0)];
      const auto dfs = [&](const auto& self, std::size_t step) -> void {
        if (step == order.size()) {
          seen.insert(TupleKey{static_cast<std::uint32_t>(sid), segs});
          return;
        }
        const auto& [slot, nbrs] = order[step];
        const auto try_candidate = [&](const StgNode& c) {
          if (!background_ && !supported(c)) return;
          for (int p : nbrs)
            if (!near_cached(c, segs[static_cast<std::size_t>(p)])) return;
          segs[static_cast<std::size_t>(slot)] = c;
          self(self, step + 1);
          segs[static_cast<std::size_t>(slot)] = StgNode{};
        };
        for (const StgNode& c : neighbors_of(segs[static_cast<std::size_t>(nbrs.front())]))
          try_candidate(c);
      };
      dfs(dfs, 0);
    }
  }
  return {seen.begin(), seen.end()};
}

void DistanceCounter::add(int color, const StgNode& v, double x) {
  if (color < 0 || color >= kMaxColors)
    throw std::invalid_argument("invalid-params: color out of range");
  if (!stg_.is_vertex(v)) throw std::invalid_argument("invalid-params: add expects a vertex");
  const int lv = stg_.depth0(v);
  if (lv > radius_) throw std::out_of_range("out-of-ball");
  any_add_ = true;
  auto [vit, inserted] = values_.try_emplace(v);
  if (inserted && background_) vit->second[static_cast<std::size_t>(background_color_)] = 1.0;
  vit->second[static_cast<std::size_t>(color)] += x;

  std::vector<StgNode> chain(static_cast<std::size_t>(lv) + 1);
  chain[static_cast<std::size_t>(lv)] = v;
  for (int l = lv; l > 0; --l)
    chain[static_cast<std::size_t>(l - 1)] = stg_.parent(chain[static_cast<std::size_t>(l)]);
  for (int l = 0; l <= lv; ++l)
    if (++touched_[chain[static_cast<std::size_t>(l)]] == 1)
      touched_by_level_[static_cast<std::size_t>(l)].push_back(chain[static_cast<std::size_t>(l)]);

  for (int l = lv; l >= 0; --l) {
    auto& dirty = dirty_by_level_[static_cast<std::size_t>(l)];
    for (const TupleKey& tk : tuples_at(chain[static_cast<std::size_t>(l)])) dirty.insert(tk);
  }
}

void DistanceCounter::flush() {
  const ChildReader reader = [this](int s, const std::array<StgNode, 4>& t) {
    return read_instance(s, t);
  };
  for (int l = radius_; l >= 0; --l) {
    auto& dirty = dirty_by_level_[static_cast<std::size_t>(l)];
    for (const TupleKey& tk : dirty) {
      DMap dm = compute_tuple(static_cast<int>(tk.sub), tk.segs, reader, !background_);
      if (dm.empty() && !background_) store_.erase(tk);
      else store_[tk] = std::move(dm);
    }
    dirty.clear();
  }
}

void DistanceCounter::init_regular(int color) {
  if (color < 0 || color >= kMaxColors)
    throw std::invalid_argument("invalid-params: color out of range");
  if (!stg_.regular()) throw std::runtime_error("not-regular");
  if (any_add_ || background_)
    throw std::invalid_argument("invalid-params: init_regular requires a fresh counter");
  background_ = true;
  background_color_ = color;
}

double DistanceCounter::count(const DistanceQuery& q) {
  flush();
  if (folding_)
    throw std::invalid_argument("invalid-params: count requires fully resolved keys");
  if (static_cast<int>(q.vertex.size()) != tmpl_.vertex_count ||
      q.edge.size() != tmpl_.edges.size())
    throw std::invalid_argument("invalid-params: query size mismatch");
  for (int d : q.vertex)
    if (d < 0 || d > radius_) return 0.0;
  for (int d : q.edge)
    if (d < 0 || d > 2 * radius_) return 0.0;
  std::array<StgNode, 4> root{};
  for (int i = 0; i < tmpl_.vertex_count; ++i) root[static_cast<std::size_t>(i)] = stg_.root();
  const DMap* dm = read_instance(full_sub_, root);
  if (dm == nullptr) return 0.0;
  int depths[4] = {0, 0, 0, 0};
  int dists[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < tmpl_.vertex_count; ++i) depths[i] = q.vertex[static_cast<std::size_t>(i)];
  for (std::size_t j = 0; j < q.edge.size(); ++j) dists[j] = q.edge[j];
  const auto it = dm->find(pack_full(subs_[static_cast<std::size_t>(full_sub_)], depths, dists));
  return it == dm->end() ? 0.0 : it->second;
}

double DistanceCounter::count_aggregate(
    const std::function<double(const DistanceQuery&)>& weight) {
  flush();
  if (folding_)
    throw std::invalid_argument("invalid-params: count_aggregate requires fully resolved keys");
  std::array<StgNode, 4> root{};
  for (int i = 0; i < tmpl_.vertex_count; ++i) root[static_cast<std::size_t>(i)] = stg_.root();
  const DMap* dm = read_instance(full_sub_, root);
  if (dm == nullptr) return 0.0;
  const std::size_t n = static_cast<std::size_t>(tmpl_.vertex_count);
  const std::size_t m = tmpl_.edges.size();
  DistanceQuery q;
  q.vertex.assign(n, 0);
  q.edge.assign(m, 0);
  double sum = 0.0;
  for (const auto& [key, val] : *dm) {
    std::uint64_t k = key;
    for (std::size_t j = m; j-- > 0;) {
      q.edge[j] = static_cast<int>(k & 63u);
      k >>= 6;
    }
    for (std::size_t i = n; i-- > 0;) {
      q.vertex[i] = static_cast<int>(k & 63u);
      k >>= 6;
    }
    sum += weight(q) * val;
  }
  return sum;
}

double DistanceCounter::weighted_aggregate(
    const std::function<double(const std::vector<int>&, long)>& weight) {
  flush();
  if (!folding_)
    throw std::invalid_argument("invalid-params: weighted_aggregate requires folded keys");
  std::array<StgNode, 4> root{};
  for (int i = 0; i < tmpl_.vertex_count; ++i) root[static_cast<std::size_t>(i)] = stg_.root();
  const DMap* dm = read_instance(full_sub_, root);
  if (dm == nullptr) return 0.0;
  const std::size_t n = static_cast<std::size_t>(tmpl_.vertex_count);
  std::vector<int> depths(n, 0);
  double sum = 0.0;
  for (const auto& [key, val] : *dm) {
    std::uint64_t k = key;
    const long exponent = static_cast<long>(k & 0xFFF) - kExpOffset;
    k >>= 12;
    for (std::size_t i = n; i-- > 0;) {
      depths[i] = static_cast<int>(k & 63u);
      k >>= 6;
    }
    sum += weight(depths, exponent) * val;
  }
  return sum;
}

}  // namespace hypgrid
