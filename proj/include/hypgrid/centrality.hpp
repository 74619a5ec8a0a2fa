#pragma once

#include <vector>

#include "hypgrid/grid.hpp"
#include "hypgrid/stg.hpp"

namespace hypgrid {

/** Per-vertex pseudo-betweenness scores with the decay parameter used. */
struct BetweennessResult {
  double gamma = 0.0;
  std::vector<double> scores;
};

/**
 * Pseudo-betweenness of every embedded vertex:
 * b(v) = Σ over ordered pairs (v1, v2) of gamma^(δ(v1,v)+δ(v,v2)−δ(v1,v2)),
 * with 0^0 = 1, so gamma = 0 counts the pairs whose shortest paths can run
 * through v.  Pairs with v1 = v2 or an endpoint equal to v are included.
 *
 * Computed by coloring all positions once in a weighted triangle counter and
 * recoloring only the center vertex per query, so the whole vector costs
 * n polylogarithmic updates instead of n^3 distance lookups.
 */
BetweennessResult pseudo_betweenness(RghtStg& stg, int radius,
                                     const std::vector<VertexId>& positions,
                                     double gamma);

}  // namespace hypgrid
