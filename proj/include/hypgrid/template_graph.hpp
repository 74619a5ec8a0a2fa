#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace hypgrid {

/**
 * Small connected pattern graph whose embeddings into a grid ball are
 * counted.  Each vertex carries a color index selecting which value layer
 * of the counter it reads.
 */
struct TemplateGraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> colors;

  void validate() const {
    if (vertex_count < 1) throw std::invalid_argument("invalid-params: template needs a vertex");
    if (vertex_count > 4) throw std::invalid_argument("template-too-large");
    if (static_cast<int>(colors.size()) != vertex_count) {
      throw std::invalid_argument("invalid-params: template color list size mismatch");
    }
    std::vector<std::vector<char>> seen(vertex_count, std::vector<char>(vertex_count, 0));
    for (const auto& [a, b] : edges) {
      if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count || a == b) {
        throw std::invalid_argument("invalid-params: bad template edge");
      }
      if (seen[a][b]) throw std::invalid_argument("invalid-params: duplicate template edge");
      seen[a][b] = seen[b][a] = 1;
    }
    std::vector<char> reached(vertex_count, 0);
    std::vector<int> stack{0};
    reached[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [a, b] : edges) {
        const int other = a == u ? b : (b == u ? a : -1);
        if (other >= 0 && !reached[other]) {
          reached[other] = 1;
          stack.push_back(other);
        }
      }
    }
    for (char r : reached) {
      if (!r) throw std::invalid_argument("invalid-params: template must be connected");
    }
  }

  static TemplateGraph single(int color = 0) { return TemplateGraph{1, {}, {color}}; }

  static TemplateGraph edge(int color1 = 0, int color2 = 0) {
    return TemplateGraph{2, {{0, 1}}, {color1, color2}};
  }

  static TemplateGraph path3(int color = 0) {
    return TemplateGraph{3, {{0, 1}, {1, 2}}, {color, color, color}};
  }

  static TemplateGraph triangle(int color1 = 0, int color2 = 0, int color3 = 0) {
    return TemplateGraph{3, {{0, 1}, {1, 2}, {0, 2}}, {color1, color2, color3}};
  }
};

}  // namespace hypgrid
