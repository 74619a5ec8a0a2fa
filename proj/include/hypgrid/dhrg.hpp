#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hypgrid/grid.hpp"
#include "hypgrid/paircount.hpp"
#include "hypgrid/stg.hpp"

namespace hypgrid {

/**
 * Discrete hyperbolic random graph model over the radius-R ball of a grid:
 * n vertices, a radial distribution P(X=r) over depths {0..R}, and a
 * connection probability table p(d) over distances {0..2R}.
 */
struct DhrgModel {
  int n = 0;
  int radius = 0;
  std::vector<double> radial;
  std::vector<double> conn;

  /** Throws invalid-params unless radial sums to 1 and conn stays in [0,1]. */
  void validate() const;

  /** Radial table P(X=r) proportional to exp(alpha * r). */
  static std::vector<double> exponential_radial(int radius, double alpha);
  /** Connection table p(x) = 1 / (1 + exp(t * x + shift)). */
  static std::vector<double> logistic_conn(int radius, double t, double shift);
};

/**
 * Model-level expectations computed from bulk-initialized distance counters,
 * without sampling.  clustering is meaningful only when clustering_defined;
 * with a vanishing wedge probability it is reported as NaN.
 */
struct ExpectedStats {
  double avg_degree = 0.0;
  std::vector<double> degree_by_radius;
  double clustering = 0.0;
  bool clustering_defined = false;
};

ExpectedStats dhrg_expected_stats(const DhrgModel& model, Grid& grid, RghtStg& stg);

/** One accepted local-search move. */
struct MoveRecord {
  long iteration = 0;
  int vertex = 0;
  VertexId from = kNoVertex;
  VertexId to = kNoVertex;
  double delta = 0.0;
  double loglik = 0.0;
};

/** Accepted moves plus the log-likelihood trace (initial value first). */
struct SearchLog {
  std::vector<MoveRecord> accepted;
  std::vector<double> trace;
};

/**
 * A sampled or loaded model instance: an embedding of vertices {0..n-1} into
 * the ball, an edge set over those vertices, and the distance histograms
 * (all unordered pairs, and edges) that make the log-likelihood and its
 * incremental updates O(R) reads.
 */
class DhrgInstance {
 public:
  /** Wraps an explicit embedding and edge set; edges are 0-based pairs. */
  DhrgInstance(DhrgModel model, Grid& grid, RghtStg& stg,
               std::vector<VertexId> embedding,
               const std::vector<std::pair<int, int>>& edges);

  /** Samples positions from the model, then edges by geometric skipping. */
  static DhrgInstance generate(const DhrgModel& model, Grid& grid, RghtStg& stg,
                               std::uint64_t seed);

  DhrgInstance(const DhrgInstance&) = delete;
  DhrgInstance& operator=(const DhrgInstance&) = delete;

  const DhrgModel& model() const { return model_; }
  Grid& grid() { return grid_; }
  const std::vector<VertexId>& embedding() const { return emb_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /** Unordered vertex pairs at distance d; distinct vertices only. */
  double pair_count(int d) const;
  /** Edges whose endpoint embeddings lie at distance d. */
  double edge_count(int d) const { return in_range(d) ? edge_hist_[(std::size_t)d] : 0.0; }

  /**
   * Sum over distances of E(d) log p(d) + (P(d) - E(d)) log(1 - p(d));
   * -infinity when the data is impossible under the model.
   */
  double loglik() const;

  /** Moves vertex v to newpos and returns the log-likelihood change. */
  double move(int v, VertexId newpos);

  /**
   * Hill climbing: proposes moving a uniform vertex to a uniform grid
   * neighbor of its position inside the ball, accepting improvements only.
   */
  SearchLog local_search(long iterations, std::uint64_t seed);

 private:
  bool in_range(int d) const { return d >= 0 && d <= 2 * model_.radius; }

  DhrgModel model_;
  Grid& grid_;
  RghtStg& stg_;
  std::vector<VertexId> emb_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
  PairCounter pairs_;
  std::vector<double> edge_hist_;
};

}  // namespace hypgrid
