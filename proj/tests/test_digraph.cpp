#include <gtest/gtest.h>

#include "consensus_lab/digraph.hpp"
#include "consensus_lab/errors.hpp"

using namespace consensus_lab;

namespace {

// Test vectors below are written 1-based, as in the JSON format.
Digraph g1(int n, std::initializer_list<std::pair<int, int>> arcs) {
  Digraph g(n);
  for (auto [a, b] : arcs) g.add_arc(a - 1, b - 1);
  return g;
}

}  // namespace

TEST(Digraph, RejectsSelfArcsAndBadNodes) {
  Digraph g(3);
  EXPECT_THROW(g.add_arc(1, 1), InvalidInput);
  EXPECT_THROW(g.add_arc(0, 3), InvalidInput);
  EXPECT_THROW(g.add_arc(-1, 0), InvalidInput);
  EXPECT_THROW(Digraph(0), InvalidInput);
  EXPECT_THROW(Digraph(65), InvalidInput);
}

TEST(Digraph, AdjacencyBookkeeping) {
  const Digraph g = g1(3, {{1, 2}, {1, 3}, {3, 2}});
  EXPECT_TRUE(g.has_arc(0, 1));
  EXPECT_FALSE(g.has_arc(1, 0));
  EXPECT_EQ(g.arc_count(), 3u);
  EXPECT_EQ(g.in_neighbors(1), 0b101u);
  EXPECT_EQ(g.out_neighbors(0), 0b110u);
  const auto arcs = g.arcs();
  ASSERT_EQ(arcs.size(), 3u);
  EXPECT_EQ(arcs[0], (Arc{0, 1}));
  EXPECT_EQ(arcs[2], (Arc{2, 1}));
}

TEST(QuasiStrong, Examples) {
  EXPECT_TRUE(is_quasi_strongly_connected(Digraph::complete(3)));
  EXPECT_FALSE(is_quasi_strongly_connected(Digraph(2)));
  EXPECT_TRUE(is_quasi_strongly_connected(g1(3, {{1, 2}, {1, 3}})));
  EXPECT_TRUE(is_quasi_strongly_connected(Digraph(1)));
}

TEST(Roots, Examples) {
  EXPECT_EQ(roots(Digraph::complete(3)), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(roots(g1(3, {{1, 2}, {1, 3}})), (std::vector<int>{0}));
  EXPECT_EQ(roots(Digraph(1)), (std::vector<int>{0}));
  EXPECT_TRUE(roots(Digraph(2)).empty());
}

TEST(Bidirectional, Examples) {
  EXPECT_TRUE(is_bidirectional(g1(2, {{1, 2}, {2, 1}})));
  EXPECT_FALSE(is_bidirectional(g1(2, {{1, 2}})));
  EXPECT_TRUE(is_bidirectional(Digraph(2)));
}

TEST(Acyclic, Examples) {
  EXPECT_TRUE(is_acyclic(g1(3, {{1, 2}, {2, 3}})));
  EXPECT_FALSE(is_acyclic(g1(2, {{1, 2}, {2, 1}})));
  EXPECT_FALSE(is_acyclic(g1(3, {{1, 2}, {2, 3}, {3, 1}})));
  EXPECT_TRUE(topological_order(g1(3, {{1, 2}, {2, 3}, {3, 1}})).empty());
  EXPECT_EQ(topological_order(g1(3, {{3, 2}, {2, 1}})), (std::vector<int>{2, 1, 0}));
}

TEST(GraphUnion, Examples) {
  const Digraph g = g1(3, {{1, 2}, {3, 1}});
  const std::vector<Digraph> same{g, g};
  EXPECT_EQ(graph_union(same, 3), g);
  const std::vector<Digraph> two{g1(3, {{1, 2}}), g1(3, {{2, 3}})};
  EXPECT_EQ(graph_union(two, 3), g1(3, {{1, 2}, {2, 3}}));
  EXPECT_EQ(graph_union({}, 4), Digraph(4));
  const std::vector<Digraph> mixed{Digraph(2), Digraph(3)};
  EXPECT_THROW(graph_union(mixed, 3), InvalidInput);
}

TEST(Reachability, ReversedAndSubgraph) {
  const Digraph g = g1(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(reachable_from(g, 0), 0b111u);
  EXPECT_EQ(reachable_from(g, 2), 0b100u);
  const Digraph r = reversed(g);
  EXPECT_TRUE(r.has_arc(1, 0));
  EXPECT_TRUE(r.has_arc(2, 1));
  EXPECT_TRUE(g1(3, {{1, 2}}).is_subgraph_of(g));
  EXPECT_FALSE(g.is_subgraph_of(g1(3, {{1, 2}})));
}

TEST(LevelFunction, Chain) {
  const LevelFunction lf = longest_path_levels(g1(3, {{1, 2}, {2, 3}}));
  EXPECT_EQ(lf.root, 0);
  EXPECT_EQ(lf.levels, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(lf.d_star, 2);
}

TEST(LevelFunction, SingleNode) {
  const LevelFunction lf = longest_path_levels(Digraph(1));
  EXPECT_EQ(lf.levels, (std::vector<int>{0}));
  EXPECT_EQ(lf.d_star, 0);
}

TEST(LevelFunction, LongestNotShortestPath) {
  const LevelFunction lf = longest_path_levels(g1(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}}));
  EXPECT_EQ(lf.levels, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_EQ(lf.d_star, 3);
}

TEST(LevelFunction, Preconditions) {
  EXPECT_THROW(longest_path_levels(g1(2, {{1, 2}, {2, 1}})), PreconditionError);
  EXPECT_THROW(longest_path_levels(Digraph(2)), PreconditionError);
}
