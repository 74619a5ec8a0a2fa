#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypgrid/grid.hpp"
#include "hypgrid/metrics.hpp"

namespace hypgrid {

/**
 * Node of a segment tree. The eight slots are interpreted by the concrete
 * tree (ring segments for triangulation grids, lattice points for binary
 * grids); unused slots stay zero so nodes compare and hash directly.
 */
struct StgNode {
  std::array<std::int64_t, 8> f{};

  friend bool operator==(const StgNode&, const StgNode&) = default;
  friend auto operator<=>(const StgNode&, const StgNode&) = default;
};

struct StgNodeHash {
  std::size_t operator()(const StgNode& n) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::int64_t v : n.f) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/**
 * Distance skeleton of a graph: a tree over vertex segments together with a
 * reflexive, symmetric "near" relation between equal-depth nodes carrying
 * exact base distances.  The graph distance between two vertices is the
 * minimum of (ascent steps a) + (ascent steps b) + base distance over all
 * near ancestor pairs; see stg_distance.
 */
class SegmentTree {
 public:
  virtual ~SegmentTree() = default;

  virtual StgNode root() = 0;
  virtual int depth0(const StgNode& s) = 0;
  /** Tree parent; invalid for the root node. */
  virtual StgNode parent(const StgNode& s) = 0;
  /** True if the node stands for a single graph vertex. */
  virtual bool is_vertex(const StgNode& s) = 0;
  /** Base distance between s and t if they are near, nullopt otherwise. */
  virtual std::optional<int> near(const StgNode& s, const StgNode& t) = 0;
  /** Every node near s (including s itself), each with its base distance. */
  virtual std::vector<std::pair<StgNode, int>> neighbors(const StgNode& s) = 0;
  /** All nodes whose parent is exactly s. */
  virtual std::vector<StgNode> child_segments(const StgNode& s) = 0;

  /** Static upper bounds: |neighbors(s)| and base distances never exceed these. */
  virtual int neighbor_bound() const = 0;
  virtual int base_distance_bound() const = 0;

  /**
   * True if the tree is regular: equal tuple class keys guarantee equal
   * sub-structure below the tuples, so bulk counting may be shared per class.
   */
  virtual bool regular() const = 0;
  /** Class key of an equal-depth node tuple; only for regular trees. */
  virtual std::string tuple_class_key(const std::vector<StgNode>& tuple) = 0;
};

/**
 * Exact distance between two nodes (normally single-vertex nodes): ascends
 * the deeper node, then both in lockstep, and takes the minimum of
 * ascent(a) + ascent(b) + base distance over every level where the ancestor
 * pair is near.  Scanning all levels up to the root keeps the operation
 * correct even when a lower near pair is not the best one.
 */
int stg_distance(SegmentTree& stg, StgNode a, StgNode b);

/**
 * Segment tree of a lazily generated triangulation grid.  Nodes are ring
 * segments of at most d_bound + 1 vertices; the parent of a segment is the
 * segment spanned by its members' parents (never wider than the child), and
 * two segments are near when their cyclic member gap is at most d_bound.
 */
class RghtStg : public SegmentTree {
 public:
  /** d_bound must come from compute_d_bound for distances to be exact. */
  RghtStg(Grid& grid, int d_bound);

  Grid& grid() { return grid_; }
  int d_bound() const { return d_; }

  /** Node of the single vertex v. */
  StgNode vertex_node(VertexId v);
  /** Node of the segment starting at left with the given member count. */
  StgNode segment(VertexId left, std::int64_t length);
  VertexId left_vertex(const StgNode& s) const;
  std::int64_t length_of(const StgNode& s) const;
  std::vector<VertexId> segment_members(const StgNode& s);

  StgNode root() override;
  int depth0(const StgNode& s) override;
  StgNode parent(const StgNode& s) override;
  bool is_vertex(const StgNode& s) override;
  std::optional<int> near(const StgNode& s, const StgNode& t) override;
  std::vector<std::pair<StgNode, int>> neighbors(const StgNode& s) override;
  std::vector<StgNode> child_segments(const StgNode& s) override;
  int neighbor_bound() const override;
  int base_distance_bound() const override { return d_; }
  bool regular() const override { return true; }
  std::string tuple_class_key(const std::vector<StgNode>& tuple) override;

 private:
  int base_distance(const StgNode& s, const StgNode& t);

  Grid& grid_;
  RingDistance ring_distance_;
  int d_ = 0;
  int len_cap_ = 0;
  std::unordered_map<std::uint64_t, std::unordered_map<std::uint64_t, int>> base_memo_;
};

/**
 * Segment tree of the descendants of the origin in the d-dimensional binary
 * grid.  Nodes are lattice points (x_1..x_{d-1}, t) with 0 <= x_i < 2^t;
 * the parent halves every coordinate, and two points are near when they sit
 * on the same level with every coordinate difference in [-4, 4].
 */
class BinaryStg : public SegmentTree {
 public:
  explicit BinaryStg(int dims);

  int dims() const { return dims_; }
  /** Node for coordinates (x_1..x_{d-1}) at the given level. */
  StgNode point(const std::vector<std::int64_t>& coords, std::int64_t level);
  std::vector<std::int64_t> coords_of(const StgNode& s) const;

  StgNode root() override;
  int depth0(const StgNode& s) override;
  StgNode parent(const StgNode& s) override;
  bool is_vertex(const StgNode&) override { return true; }
  std::optional<int> near(const StgNode& s, const StgNode& t) override;
  std::vector<std::pair<StgNode, int>> neighbors(const StgNode& s) override;
  std::vector<StgNode> child_segments(const StgNode& s) override;
  int neighbor_bound() const override;
  int base_distance_bound() const override { return 9 * dims_; }
  bool regular() const override { return true; }
  std::string tuple_class_key(const std::vector<StgNode>& tuple) override;

 private:
  int base_distance(const StgNode& s, const StgNode& t);

  int dims_ = 0;
  std::unordered_map<StgNode, std::unordered_map<StgNode, int, StgNodeHash>, StgNodeHash>
      base_memo_;
};

}  // namespace hypgrid
