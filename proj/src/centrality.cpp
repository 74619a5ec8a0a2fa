#include "hypgrid/centrality.hpp"

#include <cmath>
#include <stdexcept>

#include "hypgrid/counter.hpp"
#include "hypgrid/template_graph.hpp"

namespace hypgrid {

BetweennessResult pseudo_betweenness(RghtStg& stg, int radius,
                                     const std::vector<VertexId>& positions,
                                     double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("invalid-params: gamma must be in [0, 1)");
  BetweennessResult result;
  result.gamma = gamma;
  if (positions.empty()) return result;

  // Triangle with the center as the middle vertex: edge distances fold into
  // the exponent δ(v1,v) + δ(v,v2) − δ(v1,v2), which the triangle inequality
  // keeps non-negative.
  DistanceCounter counter(stg, TemplateGraph::triangle(0, 1, 0), radius,
                          {EdgeWeight{{}, 1}, EdgeWeight{{}, 1}, EdgeWeight{{}, -1}});
  for (const VertexId pos : positions) counter.add(0, stg.vertex_node(pos), 1.0);

  const auto resolve = [gamma](const std::vector<int>&, long exponent) {
    if (exponent == 0) return 1.0;
    return gamma == 0.0 ? 0.0 : std::pow(gamma, (double)exponent);
  };
  result.scores.reserve(positions.size());
  for (const VertexId pos : positions) {
    const StgNode node = stg.vertex_node(pos);
    counter.add(1, node, 1.0);
    result.scores.push_back(counter.weighted_aggregate(resolve));
    counter.add(1, node, -1.0);
  }
  return result;
}

}  // namespace hypgrid
