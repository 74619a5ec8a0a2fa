#include "hypgrid/grid.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hypgrid {

void TypeTable::validate() const {
  if (child_word.empty() || root_type >= child_word.size())
    throw std::runtime_error("type-table-invalid: empty table or bad root type");
  if (two_parents.size() != child_word.size())
    throw std::runtime_error("type-table-invalid: metadata size mismatch");
  for (const auto& word : child_word) {
    for (TypeId t : word)
      if (t >= child_word.size()) throw std::runtime_error("type-table-invalid: dangling type");
  }
  if (child_word[root_type].size() < 3)
    throw std::runtime_error("type-table-invalid: first ring too small");
  // Every type reachable from the root must keep producing children, otherwise
  // some ring would stop expanding and the ring structure would collapse.
  std::vector<bool> seen(child_word.size(), false);
  std::vector<TypeId> stack{root_type};
  seen[root_type] = true;
  while (!stack.empty()) {
    TypeId t = stack.back();
    stack.pop_back();
    if (t != root_type && child_word[t].empty())
      throw std::runtime_error("type-table-invalid: reachable type with empty child word");
    for (TypeId c : child_word[t]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
}

GridParams canonicalize_params(GridParams params) {
  if (params.q < 7) throw std::invalid_argument("invalid-params: q must be at least 7");
  if (params.a < 1) throw std::invalid_argument("invalid-params: a must be at least 1");
  if (params.b < 0) throw std::invalid_argument("invalid-params: b must be non-negative");
  if (params.b > params.a) std::swap(params.a, params.b);
  return params;
}

Grid::Grid(GridParams params)
    : Grid(canonicalize_params(params), build_type_table(canonicalize_params(params))) {}

Grid::Grid(GridParams params, TypeTable table)
    : params_(canonicalize_params(params)), table_(std::move(table)) {
  table_.validate();
  Record root;
  root.depth = 0;
  root.type = table_.root_type;
  root.owned.assign(table_.child_word[table_.root_type].size(), kNoVertex);
  arena_.push_back(std::move(root));
  ring_sizes_.push_back(mpz_class(1));
}

const Grid::Record& Grid::rec(VertexId v) const {
  if (v >= arena_.size()) throw std::invalid_argument("unknown-vertex: bad vertex id");
  return arena_[v];
}

Grid::Record& Grid::rec(VertexId v) {
  if (v >= arena_.size()) throw std::invalid_argument("unknown-vertex: bad vertex id");
  return arena_[v];
}

VertexId Grid::owner(VertexId v) const {
  if (v == kRoot) throw std::invalid_argument("root-has-no-owner");
  return rec(v).owner;
}

std::uint32_t Grid::owner_index(VertexId v) const {
  if (v == kRoot) throw std::invalid_argument("root-has-no-owner");
  return rec(v).owner_index;
}

VertexId Grid::create_child(VertexId parent, std::uint32_t index) {
  Record child;
  const Record& p = arena_[parent];
  child.depth = p.depth + 1;
  child.type = table_.child_word[p.type][index];
  child.owner = parent;
  child.owner_index = index;
  child.owned.assign(table_.child_word[child.type].size(), kNoVertex);
  arena_.push_back(std::move(child));
  VertexId id = static_cast<VertexId>(arena_.size() - 1);
  arena_[parent].owned[index] = id;
  return id;
}

VertexId Grid::owned_child(VertexId v, std::uint32_t i) {
  Record& r = rec(v);
  if (i >= r.owned.size()) throw std::invalid_argument("invalid-address: child index out of range");
  if (r.owned[i] == kNoVertex) return create_child(v, i);
  return r.owned[i];
}

VertexId Grid::succ(VertexId v) {
  if (v == kRoot) throw std::invalid_argument("root-has-no-ring-neighbors");
  Record& r = rec(v);
  if (r.succ != kNoVertex) return r.succ;
  VertexId result;
  VertexId p = r.owner;
  std::uint32_t i = r.owner_index;
  if (i + 1 < arena_[p].owned.size()) {
    result = owned_child(p, i + 1);
  } else if (r.depth == 1) {
    result = owned_child(kRoot, (i + 1) % arena_[kRoot].owned.size());
  } else {
    result = owned_child(succ(p), 0);
  }
  rec(v).succ = result;
  rec(result).pred = v;
  return result;
}

VertexId Grid::pred(VertexId v) {
  if (v == kRoot) throw std::invalid_argument("root-has-no-ring-neighbors");
  Record& r = rec(v);
  if (r.pred != kNoVertex) return r.pred;
  VertexId result;
  VertexId p = r.owner;
  std::uint32_t i = r.owner_index;
  if (i > 0) {
    result = owned_child(p, i - 1);
  } else if (r.depth == 1) {
    std::size_t q = arena_[kRoot].owned.size();
    result = owned_child(kRoot, static_cast<std::uint32_t>((i + q - 1) % q));
  } else {
    VertexId left = pred(p);
    result = owned_child(left, static_cast<std::uint32_t>(rec(left).owned.size() - 1));
  }
  rec(v).pred = result;
  rec(result).succ = v;
  return result;
}

std::pair<VertexId, VertexId> Grid::parents(VertexId v) {
  if (v == kRoot) throw std::invalid_argument("root-has-no-parents");
  const Record& r = rec(v);
  if (r.depth == 1) return {kRoot, kRoot};
  if (r.owner_index == 0) return {pred(r.owner), r.owner};
  return {r.owner, r.owner};
}

std::vector<VertexId> Grid::children(VertexId v) {
  std::vector<VertexId> out;
  const Record& r = rec(v);
  std::size_t w = r.owned.size();
  out.reserve(w + 1);
  for (std::uint32_t i = 0; i < w; ++i) out.push_back(owned_child(v, i));
  if (v != kRoot) out.push_back(owned_child(succ(v), 0));
  return out;
}

std::vector<VertexId> Grid::neighbors(VertexId v) {
  std::vector<VertexId> out;
  if (v != kRoot) {
    auto [pl, pr] = parents(v);
    out.push_back(pl);
    if (pr != pl) out.push_back(pr);
    out.push_back(pred(v));
    out.push_back(succ(v));
  }
  for (VertexId c : children(v)) out.push_back(c);
  return out;
}

VertexAddress Grid::address_of(VertexId v) const {
  VertexAddress address;
  while (v != kRoot) {
    const Record& r = rec(v);
    address.push_back(r.owner_index);
    v = r.owner;
  }
  std::reverse(address.begin(), address.end());
  return address;
}

VertexId Grid::vertex_at(const VertexAddress& address) {
  VertexId v = kRoot;
  for (std::uint32_t i : address) v = owned_child(v, i);
  return v;
}

const mpz_class& Grid::descendant_count(std::uint32_t m, TypeId t) {
  while (descendant_count_.size() <= m) {
    std::size_t level = descendant_count_.size();
    std::vector<mpz_class> row(table_.type_count());
    for (std::size_t ty = 0; ty < table_.type_count(); ++ty) {
      if (level == 0) {
        row[ty] = 1;
      } else {
        mpz_class total = 0;
        for (TypeId c : table_.child_word[ty]) total += descendant_count_[level - 1][c];
        row[ty] = total;
      }
    }
    descendant_count_.push_back(std::move(row));
  }
  return descendant_count_[m][t];
}

const mpz_class& Grid::ring_size(std::uint32_t k) {
  while (ring_sizes_.size() <= k) {
    std::uint32_t level = static_cast<std::uint32_t>(ring_sizes_.size());
    mpz_class total = 0;
    for (TypeId c : table_.child_word[table_.root_type])
      total += descendant_count(level - 1, c);
    ring_sizes_.push_back(std::move(total));
  }
  return ring_sizes_[k];
}

VertexId Grid::ring_vertex(std::uint32_t k, const mpz_class& index) {
  if (index < 0 || index >= ring_size(k))
    throw std::invalid_argument("invalid-ring-index: position outside ring");
  if (k == 0) return kRoot;
  mpz_class rest = index;
  VertexId v = kRoot;
  for (std::uint32_t level = 0; level < k; ++level) {
    std::uint32_t remaining = k - level - 1;
    const auto& word = table_.child_word[rec(v).type];
    std::uint32_t pick = 0;
    for (; pick + 1 < word.size(); ++pick) {
      const mpz_class& block = descendant_count(remaining, word[pick]);
      if (rest < block) break;
      rest -= block;
    }
    v = owned_child(v, pick);
  }
  return v;
}

std::optional<std::uint32_t> Grid::offset_between(VertexId a, VertexId b, std::uint32_t cap) {
  if (depth(a) != depth(b)) throw std::invalid_argument("offset-between: different rings");
  VertexId cur = a;
  for (std::uint32_t steps = 0; steps <= cap; ++steps) {
    if (cur == b) return steps;
    if (depth(a) == 0) return std::nullopt;
    cur = succ(cur);
  }
  return std::nullopt;
}

VertexId Grid::advance(VertexId v, std::uint32_t steps) {
  for (std::uint32_t i = 0; i < steps; ++i) v = succ(v);
  return v;
}

std::string Grid::describe(VertexId v) const {
  std::ostringstream out;
  out << "v" << v << "(depth " << depth(v) << ", type " << type_of(v) << ", addr ";
  VertexAddress address = address_of(v);
  for (std::size_t i = 0; i < address.size(); ++i) {
    if (i) out << '/';
    out << address[i];
  }
  out << ")";
  return out.str();
}

}  // namespace hypgrid
