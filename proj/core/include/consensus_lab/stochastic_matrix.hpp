#pragma once

#include <span>
#include <vector>

#include "consensus_lab/digraph.hpp"

namespace consensus_lab {

/// Row-sum tolerance applied when a matrix is built from raw entries.
inline constexpr double kRowSumTolerance = 1e-12;
/// Entries at or below this value are treated as zero by induced_graph.
inline constexpr double kPositivityThreshold = 1e-12;
/// Per-factor row-sum drift allowed for unnormalized products.
inline constexpr double kProductDriftPerFactor = 1e-10;

/// Dense row-major n x n matrix with nonnegative entries and unit row sums.
/// Immutable once built.
class StochasticMatrix {
 public:
  /// Validates nonnegativity and |row sum - 1| <= row_tolerance.
  StochasticMatrix(int n, std::vector<double> entries,
                   double row_tolerance = kRowSumTolerance);

  static StochasticMatrix identity(int n);
  static StochasticMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int size() const { return n_; }
  double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * n_ + j)];
  }
  std::span<const double> row(int i) const {
    return {entries_.data() + static_cast<std::size_t>(i * n_),
            static_cast<std::size_t>(n_)};
  }
  std::span<const double> entries() const { return entries_; }

  std::vector<double> apply(std::span<const double> x) const;

  friend bool operator==(const StochasticMatrix&,
                         const StochasticMatrix&) = default;

 private:
  int n_;
  std::vector<double> entries_;
};

/// Maximum column oscillation: max_j max_{a,b} |m_aj - m_bj|.
double delta(const StochasticMatrix& m);

/// 1 - min_{a,b} sum_j min(m_aj, m_bj). The matrix is scrambling iff < 1.
double lambda_coeff(const StochasticMatrix& m);

inline bool is_scrambling(const StochasticMatrix& m) {
  return lambda_coeff(m) < 1.0;
}

struct InducedGraph {
  Digraph graph;                     ///< arc (j, i) iff m_ij > threshold, i != j
  std::vector<bool> positive_diagonal;
};

InducedGraph induced_graph(const StochasticMatrix& m);

/// Left-to-right product ms[0] * ms[1] * ... * ms[k-1], not renormalized.
/// Row sums are validated against kProductDriftPerFactor * k.
StochasticMatrix product(std::span<const StochasticMatrix> ms);

}  // namespace consensus_lab
