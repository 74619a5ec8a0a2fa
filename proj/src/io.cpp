#include "hypgrid/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hypgrid {

namespace {

std::uint32_t parse_index(const std::string& part) {
  std::uint32_t value = 0;
  const char* begin = part.data();
  const char* end = begin + part.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("invalid-address: bad child index '" + part + "'");
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("invalid-params: cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("invalid-params: cannot open " + path);
  return out;
}

}  // namespace

std::string format_address(const VertexAddress& address) {
  std::string text;
  for (std::size_t i = 0; i < address.size(); ++i) {
    if (i > 0) text += '/';
    text += std::to_string(address[i]);
  }
  return text;
}

VertexAddress parse_address(const std::string& text) {
  VertexAddress address;
  if (text.empty()) return address;
  std::size_t start = 0;
  while (true) {
    const std::size_t slash = text.find('/', start);
    const std::string part =
        slash == std::string::npos ? text.substr(start) : text.substr(start, slash - start);
    if (part.empty()) throw std::invalid_argument("invalid-address: empty component");
    address.push_back(parse_index(part));
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return address;
}

void write_edge_file(const std::string& path,
                     const std::vector<std::pair<int, int>>& edges) {
  std::ofstream out = open_output(path);
  for (const auto& [u, w] : edges) out << (u + 1) << ' ' << (w + 1) << '\n';
}

std::vector<std::pair<int, int>> read_edge_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long u = 0, w = 0;
    std::string extra;
    if (!(fields >> u >> w) || (fields >> extra) || u < 1 || w < 1)
      throw std::invalid_argument("invalid-params: bad edge line " +
                                  std::to_string(lineno));
    edges.emplace_back((int)(u - 1), (int)(w - 1));
  }
  return edges;
}

void write_embedding_file(const std::string& path, Grid& grid,
                          const std::vector<VertexId>& embedding) {
  std::ofstream out = open_output(path);
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    const VertexId v = embedding[i];
    out << (i + 1) << ' ' << grid.depth(v);
    const std::string addr = format_address(grid.address_of(v));
    if (!addr.empty()) out << ' ' << addr;
    out << '\n';
  }
}

std::vector<VertexId> read_embedding_file(const std::string& path, Grid& grid) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<long long, VertexId>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    long long id = 0, depth = 0;
    std::string addr, extra;
    if (!(fields >> id >> depth) || id < 1 || depth < 0)
      throw std::invalid_argument("invalid-params: bad embedding line " +
                                  std::to_string(lineno));
    const bool has_addr = static_cast<bool>(fields >> addr);
    if (fields >> extra)
      throw std::invalid_argument("invalid-params: bad embedding line " +
                                  std::to_string(lineno));
    const VertexId v = grid.vertex_at(parse_address(has_addr ? addr : std::string()));
    if ((long long)grid.depth(v) != depth)
      throw std::invalid_argument("invalid-params: depth mismatch on line " +
                                  std::to_string(lineno));
    rows.emplace_back(id, v);
  }
  std::vector<VertexId> embedding(rows.size(), kNoVertex);
  for (const auto& [id, v] : rows) {
    if ((std::size_t)id > rows.size() || embedding[(std::size_t)(id - 1)] != kNoVertex)
      throw std::invalid_argument("invalid-params: vertex ids must cover 1..n once");
    embedding[(std::size_t)(id - 1)] = v;
  }
  return embedding;
}

}  // namespace hypgrid
