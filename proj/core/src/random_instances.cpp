#include "consensus_lab/random_instances.hpp"

#include <bit>
#include <numeric>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {
namespace {

std::vector<int> random_order(int n, CaseSampler& s) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(s.between(0, i))]);
  }
  return order;
}

StochasticMatrix sparse_rows(int n, double density, bool force_diagonal,
                             CaseSampler& s) {
  if (n < 1) throw InvalidInput("matrix size must be >= 1");
  std::vector<double> entries(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    double* row = entries.data() + static_cast<std::ptrdiff_t>(i * n);
    for (int j = 0; j < n; ++j) {
      if ((force_diagonal && i == j) || s.coin(density)) row[j] = s.uniform(0.1, 1.0);
    }
    double sum = std::accumulate(row, row + n, 0.0);
    if (sum == 0.0) {
      row[s.between(0, n - 1)] = 1.0;
      sum = 1.0;
    }
    for (int j = 0; j < n; ++j) row[j] /= sum;
  }
  return StochasticMatrix(n, std::move(entries));
}

}  // namespace

StochasticMatrix random_stochastic(int n, double density, CaseSampler& s) {
  return sparse_rows(n, density, false, s);
}

StochasticMatrix random_positive_diagonal(int n, double density, CaseSampler& s) {
  return sparse_rows(n, density, true, s);
}

Digraph random_digraph(int n, double p, CaseSampler& s) {
  Digraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && s.coin(p)) g.add_arc(i, j);
    }
  }
  return g;
}

Digraph random_rooted_digraph(int n, double extra_p, CaseSampler& s) {
  const std::vector<int> order = random_order(n, s);
  Digraph g(n);
  for (int t = 1; t < n; ++t) {
    g.add_arc(order[static_cast<std::size_t>(s.between(0, t - 1))],
              order[static_cast<std::size_t>(t)]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && s.coin(extra_p)) g.add_arc(i, j);
    }
  }
  return g;
}

Digraph random_acyclic_rooted(int n, double extra_p, CaseSampler& s) {
  const std::vector<int> order = random_order(n, s);
  Digraph g(n);
  for (int t = 1; t < n; ++t) {
    const int head = order[static_cast<std::size_t>(t)];
    g.add_arc(order[static_cast<std::size_t>(s.between(0, t - 1))], head);
    for (int u = 0; u < t; ++u) {
      if (s.coin(extra_p)) g.add_arc(order[static_cast<std::size_t>(u)], head);
    }
  }
  return g;
}

StochasticMatrix equal_weight_matrix(const Digraph& g) {
  const int n = g.size();
  std::vector<double> entries(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    const NodeMask nb = g.in_neighbors(i) | (NodeMask{1} << i);
    const double w = 1.0 / std::popcount(nb);
    for (int j = 0; j < n; ++j) {
      if ((nb >> j) & 1U) entries[static_cast<std::size_t>(i * n + j)] = w;
    }
  }
  return StochasticMatrix(n, std::move(entries));
}

std::vector<double> random_state(int n, CaseSampler& s) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = s.uniform(-10.0, 10.0);
  return x;
}

}  // namespace consensus_lab
