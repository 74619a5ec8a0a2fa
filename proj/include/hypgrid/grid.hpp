#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace hypgrid {

using VertexId = std::uint32_t;
using VertexAddress = std::vector<std::uint32_t>;
using TypeId = std::uint16_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

/**
 * Parameters of a triangulation grid with vertex degrees 6 and q, built by
 * applying the (a, b) triangle subdivision to the {3, q} tessellation.
 * Mirror-symmetric parameters are canonicalized so that a >= b.
 */
struct GridParams {
  int q = 7;
  int a = 1;
  int b = 0;
};

/**
 * Substitution table describing how each ring of the grid expands into the
 * next one. `child_word[t]` lists the types of the non-rightmost children of
 * a vertex of type t, in clockwise order; the rightmost child is shared with
 * the clockwise ring neighbor. `child_word[root_type]` lists the full first
 * ring. `two_parents[t]` tells whether a vertex of type t sits below two
 * ring-(k-1) vertices, and is redundant with the position of t in its owner's
 * word; it is kept for validation.
 */
struct TypeTable {
  TypeId root_type = 0;
  std::vector<std::vector<TypeId>> child_word;
  std::vector<bool> two_parents;

  std::size_t type_count() const { return child_word.size(); }
  void validate() const;
};

/** Validates parameters and swaps (a, b) into the canonical a >= b form. */
GridParams canonicalize_params(GridParams params);

/** Builds the substitution table for given grid parameters. */
TypeTable build_type_table(const GridParams& params);

/** Canonical text form of a table; equal strings mean identical tables. */
std::string canonical_table_serialization(const TypeTable& table);

/**
 * Builds the table for (a, b) != (1, 0) by explicitly subdividing a finite
 * ball of the {3, q} tessellation and classifying the resulting vertices.
 * Exposed separately so the pipeline can be cross-checked against the closed
 * form on (1, 0).
 */
TypeTable build_subdivision_table(const GridParams& params);

/**
 * Lazily generated triangulation grid.
 *
 * Vertices are stored in an arena and created on demand. Every non-root
 * vertex is a non-rightmost child of exactly one vertex (its right parent,
 * called its owner); the owner chain gives each vertex a canonical address:
 * the sequence of child indices from the root. Ring neighbor links (succ =
 * clockwise, pred = counterclockwise) are resolved lazily by walking up the
 * owner chain and are cached, which makes generation amortized O(1) per
 * vertex record created.
 */
class Grid {
 public:
  static constexpr VertexId kRoot = 0;

  explicit Grid(GridParams params);
  Grid(GridParams params, TypeTable table);

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridParams& params() const { return params_; }
  const TypeTable& table() const { return table_; }

  VertexId root() const { return kRoot; }
  std::uint32_t depth(VertexId v) const { return rec(v).depth; }
  TypeId type_of(VertexId v) const { return rec(v).type; }

  VertexId owner(VertexId v) const;
  std::uint32_t owner_index(VertexId v) const;
  std::size_t word_len(VertexId v) const { return table_.child_word[rec(v).type].size(); }

  /** i-th non-rightmost child (creates the record if needed). */
  VertexId owned_child(VertexId v, std::uint32_t i);

  /** Clockwise ring neighbor; invalid for the root. */
  VertexId succ(VertexId v);
  /** Counterclockwise ring neighbor; invalid for the root. */
  VertexId pred(VertexId v);

  /** Ring-(k-1) neighbors as the segment [left, right]; equal if only one. */
  std::pair<VertexId, VertexId> parents(VertexId v);

  /** All ring-(k+1) neighbors in clockwise order. */
  std::vector<VertexId> children(VertexId v);

  /** All graph neighbors: parents, ring neighbors, children. */
  std::vector<VertexId> neighbors(VertexId v);

  VertexAddress address_of(VertexId v) const;
  VertexId vertex_at(const VertexAddress& address);

  /** Exact size of ring k. */
  const mpz_class& ring_size(std::uint32_t k);

  /** Vertex at the given position of ring k, counted from the all-zeros address. */
  VertexId ring_vertex(std::uint32_t k, const mpz_class& index);

  /** Clockwise steps from a to b if at most `cap`, otherwise nullopt. */
  std::optional<std::uint32_t> offset_between(VertexId a, VertexId b, std::uint32_t cap);

  /** v advanced `steps` times clockwise. */
  VertexId advance(VertexId v, std::uint32_t steps);

  /** Number of vertex records created so far (for cost accounting). */
  std::size_t records_created() const { return arena_.size(); }

  std::string describe(VertexId v) const;

 private:
  struct Record {
    std::uint32_t depth = 0;
    TypeId type = 0;
    std::uint32_t owner_index = 0;
    VertexId owner = kNoVertex;
    VertexId succ = kNoVertex;
    VertexId pred = kNoVertex;
    std::vector<VertexId> owned;
  };

  const Record& rec(VertexId v) const;
  Record& rec(VertexId v);
  VertexId create_child(VertexId parent, std::uint32_t index);

  GridParams params_;
  TypeTable table_;
  std::vector<Record> arena_;
  std::vector<mpz_class> ring_sizes_;
  // descendant_count_[m][t]: ring-k vertices below one type-t vertex m rings down.
  std::vector<std::vector<mpz_class>> descendant_count_;

  const mpz_class& descendant_count(std::uint32_t m, TypeId t);
};

}  // namespace hypgrid
