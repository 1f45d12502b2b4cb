#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace consensus_lab {

/// Node sets are bitmasks over at most 64 nodes; bit i stands for node i.
using NodeMask = std::uint64_t;

/// Ordered pair (from, to) of distinct nodes. Node ids are 0-based in the
/// C++ API; the JSON representation is 1-based.
struct Arc {
  int from = 0;
  int to = 0;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Directed graph on nodes {0..n-1} without self-arcs, stored as dense
/// in/out adjacency bitsets.
class Digraph {
 public:
  static constexpr int kMaxNodes = 64;

  explicit Digraph(int n);
  Digraph(int n, std::span<const Arc> arcs);

  static Digraph complete(int n);

  int size() const { return n_; }

  /// Throws InvalidInput for self-arcs or out-of-range endpoints.
  void add_arc(int from, int to);
  void add_arc(Arc a) { add_arc(a.from, a.to); }
  bool has_arc(int from, int to) const;

  NodeMask out_neighbors(int i) const { return out_[static_cast<std::size_t>(i)]; }
  /// In-neighbors of i: the nodes j with an arc (j, i).
  NodeMask in_neighbors(int i) const { return in_[static_cast<std::size_t>(i)]; }

  std::size_t arc_count() const;
  bool empty() const { return arc_count() == 0; }

  /// Arcs in lexicographic (from, to) order.
  std::vector<Arc> arcs() const;

  /// Union in place; sizes must match.
  Digraph& merge(const Digraph& other);

  bool is_subgraph_of(const Digraph& other) const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  void check_node(int i) const;

  int n_;
  std::vector<NodeMask> out_;
  std::vector<NodeMask> in_;
};

/// Mask of every node reachable from `source` (source included).
NodeMask reachable_from(const Digraph& g, int source);

/// Nodes from which every node is reachable, ascending. A root is also
/// called a center.
std::vector<int> roots(const Digraph& g);

bool is_quasi_strongly_connected(const Digraph& g);
bool is_bidirectional(const Digraph& g);
bool is_acyclic(const Digraph& g);

Digraph reversed(const Digraph& g);

/// Joint graph: union of all arc sets. Every graph must have `n` nodes;
/// an empty sequence yields the empty graph on `n` nodes.
Digraph graph_union(std::span<const Digraph> graphs, int n);

/// Longest-path level function of an acyclic quasi-strongly connected graph.
struct LevelFunction {
  int root = 0;
  std::vector<int> levels;  ///< levels[i] = longest path length root -> i
  int d_star = 0;           ///< maximum level
};

/// Throws PreconditionError unless g is acyclic and quasi-strongly connected.
LevelFunction longest_path_levels(const Digraph& g);

/// Topological order of an acyclic graph, or empty if a cycle exists.
std::vector<int> topological_order(const Digraph& g);

}  // namespace consensus_lab
