#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hypgrid/grid.hpp"

namespace hypgrid {

/** Slash-joined child indices, e.g. "0/2/1"; the root is the empty string. */
std::string format_address(const VertexAddress& address);

/** Inverse of format_address; throws invalid-address on malformed text. */
VertexAddress parse_address(const std::string& text);

/**
 * Edge list file: one line per edge `U V` with 1-based vertex ids.
 * In memory edges are 0-based pairs.
 */
void write_edge_file(const std::string& path,
                     const std::vector<std::pair<int, int>>& edges);
std::vector<std::pair<int, int>> read_edge_file(const std::string& path);

/**
 * Embedding file: one line per vertex `ID DEPTH ADDR` with 1-based ids and
 * slash addresses; the root's empty address makes a two-field line.  Ids
 * must cover 1..n exactly; in memory the vector is 0-based.
 */
void write_embedding_file(const std::string& path, Grid& grid,
                          const std::vector<VertexId>& embedding);
std::vector<VertexId> read_embedding_file(const std::string& path, Grid& grid);

}  // namespace hypgrid
