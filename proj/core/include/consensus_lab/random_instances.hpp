#pragma once

#include <cstdint>
#include <vector>

#include "consensus_lab/digraph.hpp"
#include "consensus_lab/rng.hpp"
#include "consensus_lab/stochastic_matrix.hpp"

namespace consensus_lab {

/// Sequential draws for one property-test case. Everything a case generates
/// is a function of (seed, case index) alone.
class CaseSampler {
 public:
  CaseSampler(std::uint64_t seed, std::uint32_t case_index) : rng_(seed, case_index) {}

  double uniform() { return rng_.uniform(counter_++, 0, StreamTag::property_case); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool coin(double p) { return uniform() < p; }
  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) {
    return lo + static_cast<int>(rng_.below(static_cast<std::uint32_t>(hi - lo + 1),
                                            counter_++, 0, StreamTag::property_case));
  }

 private:
  RngStream rng_;
  std::uint64_t counter_ = 0;
};

/// Each entry nonzero with probability `density` (at least one per row),
/// nonzero entries drawn from [0.1, 1] before normalization.
StochasticMatrix random_stochastic(int n, double density, CaseSampler& s);

/// As random_stochastic with every diagonal entry nonzero.
StochasticMatrix random_positive_diagonal(int n, double density, CaseSampler& s);

/// Every off-diagonal arc independently with probability p.
Digraph random_digraph(int n, double p, CaseSampler& s);

/// A random spanning arborescence plus every other arc with extra_p.
Digraph random_rooted_digraph(int n, double extra_p, CaseSampler& s);

/// Acyclic and quasi-strongly connected: nodes in a random order, each
/// non-first node gets one parent among earlier nodes plus further earlier
/// in-neighbors with probability extra_p.
Digraph random_acyclic_rooted(int n, double extra_p, CaseSampler& s);

/// Equal-weight matrix of a graph: row i spreads 1/|N_i| over in-neighbors
/// and i itself, so the induced graph is g with a positive diagonal.
StochasticMatrix equal_weight_matrix(const Digraph& g);

std::vector<double> random_state(int n, CaseSampler& s);

}  // namespace consensus_lab
