#include "consensus_lab/stochastic_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {

StochasticMatrix::StochasticMatrix(int n, std::vector<double> entries,
                                   double row_tolerance)
    : n_(n), entries_(std::move(entries)) {
  if (n < 1 || n > Digraph::kMaxNodes) {
    throw InvalidInput("stochastic matrix dimension must be in [1, 64]");
  }
  if (entries_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw InvalidInput("stochastic matrix needs n*n entries");
  }
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (double v : row(i)) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidInput("stochastic matrix entry in row " +
                           std::to_string(i) + " is negative or not finite");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > row_tolerance) {
      throw InvalidInput("row " + std::to_string(i) + " sums to " +
                         std::to_string(sum) + ", not 1");
    }
  }
}

StochasticMatrix StochasticMatrix::identity(int n) {
  std::vector<double> e(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) e[static_cast<std::size_t>(i * n + i)] = 1.0;
  return StochasticMatrix(n, std::move(e));
}

StochasticMatrix StochasticMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<double> e;
  e.reserve(rows.size() * rows.size());
  for (const auto& r : rows) {
    if (r.size() != rows.size()) {
      throw InvalidInput("stochastic matrix rows must have length n");
    }
    e.insert(e.end(), r.begin(), r.end());
  }
  return StochasticMatrix(n, std::move(e));
}

std::vector<double> StochasticMatrix::apply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) {
    throw InvalidInput("vector length does not match matrix dimension");
  }
  std::vector<double> y(x.size(), 0.0);
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    const auto r = row(i);
    for (std::size_t j = 0; j < x.size(); ++j) acc += r[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

double delta(const StochasticMatrix& m) {
  const int n = m.size();
  double result = 0.0;
  for (int j = 0; j < n; ++j) {
    double lo = m(0, j);
    double hi = lo;
    for (int i = 1; i < n; ++i) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
    result = std::max(result, hi - lo);
  }
  return result;
}

double lambda_coeff(const StochasticMatrix& m) {
  const int n = m.size();
  double min_overlap = 1.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double overlap = 0.0;
      for (int j = 0; j < n; ++j) overlap += std::min(m(a, j), m(b, j));
      min_overlap = std::min(min_overlap, overlap);
    }
  }
  // Rounding can push the overlap a hair above 1 for identical rows.
  return std::clamp(1.0 - min_overlap, 0.0, 1.0);
}

InducedGraph induced_graph(const StochasticMatrix& m) {
  const int n = m.size();
  InducedGraph result{Digraph(n), std::vector<bool>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (m(i, j) <= kPositivityThreshold) continue;
      if (i == j) {
        result.positive_diagonal[static_cast<std::size_t>(i)] = true;
      } else {
        result.graph.add_arc(j, i);
      }
    }
  }
  return result;
}

StochasticMatrix product(std::span<const StochasticMatrix> ms) {
  if (ms.empty()) throw InvalidInput("product of an empty matrix sequence");
  const int n = ms.front().size();
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> acc(ms.front().entries().begin(), ms.front().entries().end());
  std::vector<double> next(acc.size());
  for (std::size_t f = 1; f < ms.size(); ++f) {
    const StochasticMatrix& rhs = ms[f];
    if (rhs.size() != n) throw InvalidInput("product: dimension mismatch");
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t k = 0; k < nn; ++k) {
        const double a = acc[i * nn + k];
        if (a == 0.0) continue;
        const auto r = rhs.row(static_cast<int>(k));
        for (std::size_t j = 0; j < nn; ++j) next[i * nn + j] += a * r[j];
      }
    }
    acc.swap(next);
  }
  const double tolerance =
      std::max(kRowSumTolerance,
               kProductDriftPerFactor * static_cast<double>(ms.size()));
  return StochasticMatrix(n, std::move(acc), tolerance);
}

}  // namespace consensus_lab
