#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hypgrid/stg.hpp"
#include "hypgrid/template_graph.hpp"

namespace hypgrid {

/**
 * One counting query: required depth of every template vertex (0..R) and
 * required distance along every template edge (0..2R), in template order.
 */
struct DistanceQuery {
  std::vector<int> vertex;
  std::vector<int> edge;
};

/**
 * Per-edge folding rule for weight-aggregating counters.  When an edge's
 * distance becomes determined during the recursion, either `table[distance]`
 * is multiplied into the running value, or `exponent_sign * distance` is
 * added to a tracked integer exponent that the caller resolves at the end.
 * Folding removes the edge distances from the stored keys, which keeps the
 * tables small for queries that only need a weighted sum.
 */
struct EdgeWeight {
  std::vector<double> table;
  int exponent_sign = 0;
};

/**
 * Dynamic embedding counter over a segment tree.  Vertices of the underlying
 * graph carry per-color real values; count(q) returns the sum over all maps
 * m from template vertices into the radius-R ball of the product of values
 * at the images, restricted to maps whose image depths and pairwise edge
 * distances match q exactly.
 *
 * The structure maintains, for every connected partial subgraph of the
 * template and every tuple of same-depth segments related along the subgraph
 * edges, the restriction counts over descendants of the tuple.  add() updates
 * the affected tuples bottom-up along the ancestor chain of the changed
 * vertex; init_regular() bulk-initializes one value per vertex by evaluating
 * each tuple class only once per depth.
 */
class DistanceCounter {
 public:
  static constexpr int kMaxColors = 8;

  /** Counter with fully distance-resolved keys. */
  DistanceCounter(SegmentTree& stg, TemplateGraph tmpl, int radius);
  /** Counter folding edge weights; `weights` aligns with tmpl.edges. */
  DistanceCounter(SegmentTree& stg, TemplateGraph tmpl, int radius,
                  std::vector<EdgeWeight> weights);

  DistanceCounter(const DistanceCounter&) = delete;
  DistanceCounter& operator=(const DistanceCounter&) = delete;

  const TemplateGraph& templ() const { return tmpl_; }
  int radius() const { return radius_; }
  /** Connected vertex subsets of the template with their induced edges. */
  int induced_subgraph_count() const;

  /** Adds x to the value of `v` in the given color layer. */
  void add(int color, const StgNode& v, double x);
  /** Current value of one vertex in one color layer. */
  double value_of(int color, const StgNode& v) const;

  /** Exact count of one query; only for fully resolved counters. */
  double count(const DistanceQuery& q);

  /**
   * Bulk-initializes value 1 in the given color for every ball vertex,
   * equivalent to one add() per vertex.  Requires a fresh counter on a
   * regular segment tree.
   */
  void init_regular(int color);

  /** Sum of weight(q) * count(q) over the stored nonzero queries. */
  double count_aggregate(const std::function<double(const DistanceQuery&)>& weight);
  /**
   * Folding counters: sum of weight(vertex depths, exponent) * value over
   * the stored aggregate keys.
   */
  double weighted_aggregate(
      const std::function<double(const std::vector<int>&, long)>& weight);

 private:
  struct Subgraph {
    std::uint32_t vmask = 0;
    std::uint32_t emask = 0;
    std::vector<int> verts;        // ascending template vertex ids
    std::vector<int> edges;        // ascending template edge indices
    std::vector<int> vslot;        // template vertex id -> index in verts, -1 if absent
    std::vector<int> eslot;        // template edge index -> index in edges, -1 if absent
    std::vector<std::vector<std::pair<int, std::vector<int>>>> fill_orders;
  };

  struct TupleKey {
    std::uint32_t sub = 0;
    std::array<StgNode, 4> segs{};

    friend bool operator==(const TupleKey&, const TupleKey&) = default;
  };
  struct TupleKeyHash {
    std::size_t operator()(const TupleKey& k) const noexcept {
      std::size_t h = k.sub * 0x9e3779b9u;
      StgNodeHash nh;
      for (const StgNode& s : k.segs) h ^= nh(s) + 0x9e3779b9u + (h << 6) + (h >> 2);
      return h;
    }
  };

  using DMap = std::unordered_map<std::uint64_t, double>;
  using ChildReader = std::function<const DMap*(int sub_id, const std::array<StgNode, 4>&)>;

  struct PairHash {
    std::size_t operator()(const std::array<StgNode, 2>& p) const noexcept {
      StgNodeHash nh;
      return nh(p[0]) * 0x9e3779b97f4a7c15ull + nh(p[1]);
    }
  };

  void build_subgraphs();
  int subgraph_id(std::uint32_t vmask, std::uint32_t emask) const;
  const std::vector<StgNode>& children_of(const StgNode& s);
  const std::vector<StgNode>& neighbors_of(const StgNode& s);
  std::optional<int> near_cached(const StgNode& a, const StgNode& b);
  DMap compute_tuple(int sub_id, const std::array<StgNode, 4>& u, const ChildReader& read,
                     bool restrict_support);
  void accumulate_combo(const Subgraph& D, unsigned umask, const std::vector<int>& pend,
                        const std::array<StgNode, 4>& childs, const std::array<int, 6>& base_near,
                        int ell, double factor, const ChildReader& read, DMap& out);
  void fold_edge(int edge_idx, int dist, double& val, long& exponent) const;
  std::uint64_t pack_full(const Subgraph& D, const int* depths, const int* dists) const;
  std::uint64_t pack_fold(const Subgraph& D, const int* depths, long exponent) const;
  void unpack_into(const Subgraph& S, std::uint64_t key, const Subgraph& D, int* depths,
                   int* dists, long& exponent) const;
  bool supported(const StgNode& s) const;
  std::vector<TupleKey> tuples_at(const StgNode& anchor);
  void flush();
  std::string class_store_key(int sub_id, const std::array<StgNode, 4>& u);
  const DMap* read_instance(int sub_id, const std::array<StgNode, 4>& u);
  const DMap* class_value(int sub_id, const std::array<StgNode, 4>& u);

  SegmentTree& stg_;
  TemplateGraph tmpl_;
  int radius_ = 0;
  bool folding_ = false;
  std::vector<EdgeWeight> weights_;

  std::vector<Subgraph> subs_;
  std::unordered_map<std::uint64_t, int> sub_index_;
  int full_sub_ = -1;
  int induced_count_ = 0;

  std::unordered_map<StgNode, std::array<double, kMaxColors>, StgNodeHash> values_;
  bool background_ = false;
  int background_color_ = 0;
  bool any_add_ = false;

  std::unordered_map<StgNode, long, StgNodeHash> touched_;
  std::vector<std::vector<StgNode>> touched_by_level_;

  std::unordered_map<TupleKey, DMap, TupleKeyHash> store_;
  std::vector<std::unordered_set<TupleKey, TupleKeyHash>> dirty_by_level_;
  std::unordered_map<std::string, DMap> class_store_;
  std::unordered_map<TupleKey, std::string, TupleKeyHash> ckey_cache_;
  std::unordered_map<StgNode, std::vector<StgNode>, StgNodeHash> child_cache_;
  std::unordered_map<StgNode, std::vector<StgNode>, StgNodeHash> nbr_cache_;
  std::unordered_map<std::array<StgNode, 2>, int, PairHash> near_cache_;
};

}  // namespace hypgrid
