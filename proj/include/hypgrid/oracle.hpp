#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hypgrid/grid.hpp"
#include "hypgrid/template_graph.hpp"

namespace hypgrid {

/**
 * Reference distance computations over the ball of a given radius.
 * Shortest paths between ball vertices never leave the ball (routes through
 * deeper rings can be projected upward without growing), so breadth-first
 * search over the induced subgraph is exact.
 */
class BallOracle {
 public:
  BallOracle(Grid& grid, int radius);

  const std::vector<VertexId>& vertices() const { return verts_; }
  int index_of(VertexId v) const;
  const std::vector<int>& distance_row(VertexId source);
  int distance(VertexId a, VertexId b);

 private:
  std::vector<VertexId> verts_;
  std::unordered_map<VertexId, int> index_;
  std::vector<std::vector<int>> adjacency_;
  std::unordered_map<int, std::vector<int>> rows_;
};

/** Ball vertices in ring order (ring by ring, clockwise within each ring). */
std::vector<VertexId> ball_vertices(Grid& grid, int radius);

/** Plain breadth-first distance; throws "bfs-cap-exceeded" beyond the cap. */
int bfs_distance(Grid& grid, VertexId a, VertexId b, int cap);

/**
 * Direct sum over all maps from template vertices into the supports of the
 * per-color value layers.  Returns every nonzero query value keyed by
 * [vertex depths..., edge distances...].  Throws "too-large" if the product
 * of support sizes exceeds 10^8.
 */
std::map<std::vector<int>, double> enumerate_embeddings(
    Grid& grid, int radius, const TemplateGraph& tmpl,
    const std::vector<std::unordered_map<VertexId, double>>& values_by_color);

/** Weighted ordered-pair distance histogram (self pairs included at 0). */
std::vector<double> brute_pair_histogram(
    Grid& grid, int radius, const std::vector<std::pair<VertexId, double>>& weighted);

/**
 * Log-likelihood of an edge list under per-distance connection probabilities:
 * sum over distances of E(d)·log p(d) + (P(d)−E(d))·log(1−p(d)) with P from
 * unordered distinct index pairs.  Returns -infinity for impossible data.
 */
double brute_loglik(Grid& grid, int radius, const std::vector<VertexId>& positions,
                    const std::vector<std::pair<int, int>>& edges,
                    const std::vector<double>& p_by_distance);

/**
 * Direct triple loop for the pseudo-betweenness scores
 * b(i) = Σ over ordered index pairs of gamma^(δ(p_j,p_i)+δ(p_i,p_k)−δ(p_j,p_k)),
 * with 0^0 = 1.
 */
std::vector<double> brute_betweenness(Grid& grid, int radius,
                                      const std::vector<VertexId>& positions, double gamma);

/**
 * Breadth-first distance in the d-dimensional binary grid restricted to
 * levels 0..depth_cap.  A point is (x_1,...,x_{d-1}, t) with 0 ≤ x_i < 2^t.
 */
int binary_box_distance(int dims, const std::vector<std::int64_t>& a,
                        const std::vector<std::int64_t>& b, int depth_cap);

}  // namespace hypgrid
