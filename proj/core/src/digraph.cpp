#include "consensus_lab/digraph.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {
namespace {

constexpr NodeMask bit(int i) { return NodeMask{1} << i; }

NodeMask all_nodes(int n) {
  return n == 64 ? ~NodeMask{0} : (bit(n) - 1);
}

}  // namespace

Digraph::Digraph(int n) : n_(n) {
  if (n < 1 || n > kMaxNodes) {
    throw InvalidInput("digraph node count must be in [1, 64], got " +
                       std::to_string(n));
  }
  out_.assign(static_cast<std::size_t>(n), 0);
  in_.assign(static_cast<std::size_t>(n), 0);
}

Digraph::Digraph(int n, std::span<const Arc> arcs) : Digraph(n) {
  for (const Arc& a : arcs) add_arc(a);
}

Digraph Digraph::complete(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) g.add_arc(i, j);
    }
  }
  return g;
}

void Digraph::check_node(int i) const {
  if (i < 0 || i >= n_) {
    throw InvalidInput("node " + std::to_string(i) + " out of range for n=" +
                       std::to_string(n_));
  }
}

void Digraph::add_arc(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) {
    throw InvalidInput("self-arc (" + std::to_string(from) + ", " +
                       std::to_string(to) + ") rejected");
  }
  out_[static_cast<std::size_t>(from)] |= bit(to);
  in_[static_cast<std::size_t>(to)] |= bit(from);
}

bool Digraph::has_arc(int from, int to) const {
  check_node(from);
  check_node(to);
  return (out_[static_cast<std::size_t>(from)] & bit(to)) != 0;
}

std::size_t Digraph::arc_count() const {
  std::size_t count = 0;
  for (NodeMask m : out_) count += static_cast<std::size_t>(std::popcount(m));
  return count;
}

std::vector<Arc> Digraph::arcs() const {
  std::vector<Arc> result;
  result.reserve(arc_count());
  for (int i = 0; i < n_; ++i) {
    for (NodeMask m = out_[static_cast<std::size_t>(i)]; m != 0; m &= m - 1) {
      result.push_back({i, std::countr_zero(m)});
    }
  }
  return result;
}

Digraph& Digraph::merge(const Digraph& other) {
  if (other.n_ != n_) {
    throw InvalidInput("cannot merge graphs with different node counts");
  }
  for (std::size_t i = 0; i < out_.size(); ++i) {
    out_[i] |= other.out_[i];
    in_[i] |= other.in_[i];
  }
  return *this;
}

bool Digraph::is_subgraph_of(const Digraph& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t i = 0; i < out_.size(); ++i) {
    if ((out_[i] & ~other.out_[i]) != 0) return false;
  }
  return true;
}

NodeMask reachable_from(const Digraph& g, int source) {
  NodeMask seen = bit(source);
  NodeMask frontier = seen;
  while (frontier != 0) {
    NodeMask next = 0;
    for (NodeMask m = frontier; m != 0; m &= m - 1) {
      next |= g.out_neighbors(std::countr_zero(m));
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return seen;
}

std::vector<int> roots(const Digraph& g) {
  const NodeMask everyone = all_nodes(g.size());
  std::vector<int> result;
  for (int i = 0; i < g.size(); ++i) {
    if (reachable_from(g, i) == everyone) result.push_back(i);
  }
  return result;
}

bool is_quasi_strongly_connected(const Digraph& g) {
  const NodeMask everyone = all_nodes(g.size());
  for (int i = 0; i < g.size(); ++i) {
    if (reachable_from(g, i) == everyone) return true;
  }
  return false;
}

bool is_bidirectional(const Digraph& g) {
  for (int i = 0; i < g.size(); ++i) {
    if (g.out_neighbors(i) != g.in_neighbors(i)) return false;
  }
  return true;
}

std::vector<int> topological_order(const Digraph& g) {
  const int n = g.size();
  std::vector<int> indegree(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    indegree[static_cast<std::size_t>(i)] = std::popcount(g.in_neighbors(i));
  }
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> ready;
  for (int i = n - 1; i >= 0; --i) {
    if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    const int u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (NodeMask m = g.out_neighbors(u); m != 0; m &= m - 1) {
      const int v = std::countr_zero(m);
      if (--indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    }
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

bool is_acyclic(const Digraph& g) { return !topological_order(g).empty(); }

Digraph reversed(const Digraph& g) {
  Digraph r(g.size());
  for (const Arc& a : g.arcs()) r.add_arc(a.to, a.from);
  return r;
}

Digraph graph_union(std::span<const Digraph> graphs, int n) {
  Digraph result(n);
  for (const Digraph& g : graphs) {
    if (g.size() != n) {
      throw InvalidInput("graph_union: node count mismatch (" +
                         std::to_string(g.size()) + " vs " +
                         std::to_string(n) + ")");
    }
    result.merge(g);
  }
  return result;
}

LevelFunction longest_path_levels(const Digraph& g) {
  const std::vector<int> order = topological_order(g);
  if (order.empty()) {
    throw PreconditionError("level function requires an acyclic graph");
  }
  const std::vector<int> centers = roots(g);
  if (centers.empty()) {
    throw PreconditionError(
        "level function requires a quasi-strongly connected graph");
  }
  // An acyclic graph with a root has exactly one: the unique source.
  LevelFunction result;
  result.root = centers.front();
  result.levels.assign(static_cast<std::size_t>(g.size()), 0);
  for (int u : order) {
    const int next = result.levels[static_cast<std::size_t>(u)] + 1;
    for (NodeMask m = g.out_neighbors(u); m != 0; m &= m - 1) {
      int& level = result.levels[static_cast<std::size_t>(std::countr_zero(m))];
      level = std::max(level, next);
    }
  }
  result.d_star =
      *std::max_element(result.levels.begin(), result.levels.end());
  return result;
}

}  // namespace consensus_lab
