#include "hypgrid/paircount.hpp"

#include <cmath>
#include <stdexcept>

namespace hypgrid {

PairCounter::PairCounter(SegmentTree& stg, int radius) : stg_(stg), radius_(radius) {
  if (radius_ < 0 || radius_ > 31)
    throw std::invalid_argument("invalid-params: radius must be in [0, 31]");
  hist_.assign(static_cast<std::size_t>(2 * radius_) + 1, 0.0);
}

const std::vector<std::pair<StgNode, int>>& PairCounter::neighbors_of(const StgNode& s) {
  auto [it, inserted] = nbr_cache_.try_emplace(s);
  if (inserted) it->second = stg_.neighbors(s);
  return it->second;
}

const std::vector<StgNode>& PairCounter::children_of(const StgNode& s) {
  auto [it, inserted] = child_cache_.try_emplace(s);
  if (inserted) it->second = stg_.child_segments(s);
  return it->second;
}

bool PairCounter::near_flag(const StgNode& a, const StgNode& b) {
  const std::array<StgNode, 2> key =
      a <= b ? std::array<StgNode, 2>{a, b} : std::array<StgNode, 2>{b, a};
  auto [it, inserted] = near_cache_.try_emplace(key, -2);
  if (it->second == -2) it->second = stg_.near(key[0], key[1]) ? 1 : 0;
  return it->second == 1;
}

std::vector<StgNode> PairCounter::ancestor_chain(const StgNode& v) const {
  const int lv = stg_.depth0(v);
  std::vector<StgNode> chain(static_cast<std::size_t>(lv) + 1);
  chain[static_cast<std::size_t>(lv)] = v;
  for (int l = lv; l > 0; --l)
    chain[static_cast<std::size_t>(l - 1)] = stg_.parent(chain[static_cast<std::size_t>(l)]);
  return chain;
}

double PairCounter::value_of(const StgNode& v) const {
  const auto it = val_.find(v);
  return it == val_.end() ? 0.0 : it->second;
}

double PairCounter::count(int d) const {
  if (d < 0 || d > 2 * radius_) return 0.0;
  return hist_[static_cast<std::size_t>(d)];
}

double PairCounter::subtree_count(const StgNode& s, int dep) const {
  if (dep < 0 || dep > radius_) return 0.0;
  const auto it = c_.find(s);
  return it == c_.end() ? 0.0 : it->second[static_cast<std::size_t>(dep)];
}

std::vector<double> PairCounter::distance_profile(const StgNode& v) {
  if (!stg_.is_vertex(v))
    throw std::invalid_argument("invalid-params: profile expects a vertex");
  const int lv = stg_.depth0(v);
  if (lv > radius_) throw std::out_of_range("out-of-ball");
  const std::vector<StgNode> chain = ancestor_chain(v);
  std::vector<double> S(static_cast<std::size_t>(2 * radius_) + 1, 0.0);
  const auto accumulate = [&](const StgNode& seg, int base, double sign, int min_dep) {
    const auto itc = c_.find(seg);
    if (itc == c_.end()) return;
    for (int dep = min_dep; dep <= radius_; ++dep) {
      const double value = itc->second[static_cast<std::size_t>(dep)];
      if (value == 0.0) continue;
      const int d = base + dep;
      if (d >= 0 && d <= 2 * radius_) S[static_cast<std::size_t>(d)] += sign * value;
    }
  };
  for (int l = lv; l >= 0; --l) {
    const StgNode& s = chain[static_cast<std::size_t>(l)];
    const int up = lv - l;
    for (const auto& [nbr, dn] : neighbors_of(s)) {
      const int base = up + dn - l;
      accumulate(nbr, base, 1.0, l);
      if (l < lv) {
        // pairs whose ancestors are already near one level deeper were
        // counted there; remove them at this level's distance offset
        for (const StgNode& child : children_of(nbr))
          if (near_flag(child, chain[static_cast<std::size_t>(l + 1)]))
            accumulate(child, base, -1.0, l + 1);
      }
    }
  }
  S[0] -= value_of(v);
  return S;
}

void PairCounter::add(const StgNode& v, double x) {
  if (!stg_.is_vertex(v)) throw std::invalid_argument("invalid-params: add expects a vertex");
  const int lv = stg_.depth0(v);
  if (lv > radius_) throw std::out_of_range("out-of-ball");
  const std::vector<double> S = distance_profile(v);
  const double old = value_of(v);
  for (int d = 0; d <= 2 * radius_; ++d) hist_[static_cast<std::size_t>(d)] += 2.0 * x * S[static_cast<std::size_t>(d)];
  hist_[0] += 2.0 * old * x + x * x;
  val_[v] = old + x;
  for (const StgNode& s : ancestor_chain(v)) {
    auto [it, inserted] = c_.try_emplace(s);
    if (inserted) it->second.assign(static_cast<std::size_t>(radius_) + 1, 0.0);
    it->second[static_cast<std::size_t>(lv)] += x;
  }
}

StgNode PairCounter::select_at_distance(const StgNode& v, int d, long long idx) {
  if (!stg_.is_vertex(v))
    throw std::invalid_argument("invalid-params: selection expects a vertex");
  const int lv = stg_.depth0(v);
  if (lv > radius_) throw std::out_of_range("out-of-ball");
  if (idx < 1 || d < 0 || d > 2 * radius_) throw std::out_of_range("index-out-of-range");
  const std::vector<StgNode> chain = ancestor_chain(v);

  const auto rounded = [](double x) { return std::llround(x); };
  // vertices at depth dep under seg, in child order; the exclude list applies
  // only to the top call (those subtrees belong to a deeper level)
  const auto descend = [&](const StgNode& top, int top_level, int dep, long long want,
                           const std::vector<StgNode>* exclude) -> StgNode {
    StgNode seg = top;
    int level = top_level;
    while (level < dep) {
      bool moved = false;
      for (const StgNode& child : children_of(seg)) {
        if (exclude != nullptr) {
          bool skip = false;
          for (const StgNode& e : *exclude)
            if (child == e) { skip = true; break; }
          if (skip) continue;
        }
        const long long cnt = rounded(subtree_count(child, dep));
        if (want <= cnt) {
          seg = child;
          ++level;
          moved = true;
          break;
        }
        want -= cnt;
      }
      if (!moved) throw std::logic_error("internal: subtree selection exhausted");
      exclude = nullptr;
    }
    return seg;
  };

  long long want = idx;
  for (int l = lv; l >= 0; --l) {
    const StgNode& s = chain[static_cast<std::size_t>(l)];
    const int up = lv - l;
    for (const auto& [nbr, dn] : neighbors_of(s)) {
      const int dep = d - (up + dn - l);
      if (dep < l || dep > radius_) continue;
      long long net = rounded(subtree_count(nbr, dep));
      if (net == 0) continue;
      std::vector<StgNode> deeper;
      if (l < lv) {
        for (const StgNode& child : children_of(nbr))
          if (near_flag(child, chain[static_cast<std::size_t>(l + 1)])) {
            net -= rounded(subtree_count(child, dep));
            deeper.push_back(child);
          }
      } else if (nbr == v && dep == lv) {
        net -= rounded(value_of(v));  // a vertex is not at distance 0 from itself
      }
      if (net <= 0) continue;
      if (want <= net) {
        if (l == lv && nbr == v && dep == lv)
          throw std::logic_error("internal: self cell should be empty");
        return descend(nbr, l, dep, want, deeper.empty() ? nullptr : &deeper);
      }
      want -= net;
    }
  }
  throw std::out_of_range("index-out-of-range");
}

}  // namespace hypgrid
