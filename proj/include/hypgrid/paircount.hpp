#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hypgrid/stg.hpp"

namespace hypgrid {

/**
 * Specialized pair counter over a segment tree: maintains per-vertex real
 * values and the ordered-pair distance histogram
 * Count(d) = Σ val(v1)·val(v2) over pairs with δ(v1,v2) = d, self pairs
 * included at distance 0.  Each update costs O(R²) neighbor-segment scans.
 *
 * Every vertex pair is charged to the deepest level at which the two
 * ancestor segments are near each other; contributions visible at shallower
 * levels are cancelled by subtracting the near child-segment sums, and the
 * surviving level determines the pair's distance (climb, near hop, descend).
 *
 * select_at_distance inverts the count: with non-negative integer values it
 * returns the idx-th vertex at a given distance in a fixed deterministic
 * order (deepest ancestor level first, then neighbor order, then subtree
 * order), a vertex of value k occupying k consecutive indices.
 */
class PairCounter {
 public:
  PairCounter(SegmentTree& stg, int radius);

  PairCounter(const PairCounter&) = delete;
  PairCounter& operator=(const PairCounter&) = delete;

  int radius() const { return radius_; }

  /** Adds x to the value of vertex v and updates the histogram. */
  void add(const StgNode& v, double x);
  /** Current value of one vertex. */
  double value_of(const StgNode& v) const;
  /** Histogram entry Count(d); zero outside [0, 2R]. */
  double count(int d) const;
  /** Sum of values of descendants of segment s at depth dep. */
  double subtree_count(const StgNode& s, int dep) const;
  /** Cross counts S_d = Σ_{w≠v} val(w)·[δ(v,w)=d] for d in [0, 2R]. */
  std::vector<double> distance_profile(const StgNode& v);
  /** The idx-th (1-based) vertex w with δ(v,w) = d; throws index-out-of-range. */
  StgNode select_at_distance(const StgNode& v, int d, long long idx);

 private:
  struct PairHash {
    std::size_t operator()(const std::array<StgNode, 2>& p) const noexcept {
      StgNodeHash nh;
      return nh(p[0]) * 0x9e3779b97f4a7c15ull + nh(p[1]);
    }
  };

  const std::vector<std::pair<StgNode, int>>& neighbors_of(const StgNode& s);
  const std::vector<StgNode>& children_of(const StgNode& s);
  bool near_flag(const StgNode& a, const StgNode& b);
  std::vector<StgNode> ancestor_chain(const StgNode& v) const;

  SegmentTree& stg_;
  int radius_ = 0;
  std::unordered_map<StgNode, double, StgNodeHash> val_;
  std::unordered_map<StgNode, std::vector<double>, StgNodeHash> c_;
  std::vector<double> hist_;
  std::unordered_map<StgNode, std::vector<std::pair<StgNode, int>>, StgNodeHash> nbr_cache_;
  std::unordered_map<StgNode, std::vector<StgNode>, StgNodeHash> child_cache_;
  std::unordered_map<std::array<StgNode, 2>, int, PairHash> near_cache_;
};

}  // namespace hypgrid
