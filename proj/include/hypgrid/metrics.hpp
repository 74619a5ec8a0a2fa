#pragma once

#include <cstdint>
#include <unordered_map>

#include "hypgrid/grid.hpp"

namespace hypgrid {

/**
 * Exact graph distance between two vertices on the same ring.
 *
 * The distance is the minimum of the two ring arcs and of every route that
 * descends to lower rings; the latter always decomposes through a pair of
 * parents, so the recursion
 *   dist(a, b) = min(arc(a, b), 2 + min over parent pairs dist(pa, pb))
 * is exact.  Results are memoized per unordered vertex pair.
 */
class RingDistance {
 public:
  explicit RingDistance(Grid& grid) : grid_(grid) {}

  int operator()(VertexId a, VertexId b);

 private:
  Grid& grid_;
  std::unordered_map<std::uint64_t, int> memo_;
};

/**
 * Least D such that a ring arc longer than D can always be beaten by a route
 * through lower rings.  Computed by recursive exploration of ring segments
 * with two pruning rules (a segment interior containing a vertex that owns
 * two or more children stops growing relative to lower routes; segments with
 * a previously seen type/distance signature behave identically).  Throws
 * "bound-search-overflow" if the exploration exceeds its depth cap.
 */
int compute_d_bound(Grid& grid);

/**
 * Asymptotic per-ring growth factor: the dominant eigenvalue of the matrix
 * counting, per vertex type, the types of its owned children.
 */
double growth_constant(const TypeTable& table);
double growth_constant(const Grid& grid);

}  // namespace hypgrid
