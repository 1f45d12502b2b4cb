#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/random_instances.hpp"

namespace consensus_lab {

/// A randomized property: returns a failure message, or nothing on success.
using Property = std::function<std::optional<std::string>(CaseSampler&)>;

struct PropertyFailure {
  std::string property;
  std::uint32_t case_index = 0;
  std::string message;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::uint32_t cases = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  /// The first few failures, in (property, case) order.
  std::vector<PropertyFailure> failures;

  bool passed() const { return violations == 0; }
  /// "--suite S --cases 1 --seed X" style description of the first failure.
  std::string reproducer() const;
};

/// delta(M_1...M_k) <= prod lambda(M_i) + 1e-9 for random stochastic M_i,
/// n <= 6, k <= 5.
std::optional<std::string> check_product_contraction(CaseSampler& s);

/// Positive-diagonal sequences: the induced graph of the product contains
/// the union of the factors' induced graphs.
std::optional<std::string> check_induced_union(CaseSampler& s);

/// n-1 equal-weight matrices of rooted graphs (n in {3,4,5}) multiply to a
/// scrambling matrix.
std::optional<std::string> check_rooted_scrambling(CaseSampler& s);

/// Longest-path levels of a random acyclic rooted graph (n <= 8) cover
/// every value in [0, d_star].
std::optional<std::string> check_level_function(CaseSampler& s);

/// Roots, quasi-strong connectivity and acyclicity agree with a transitive
/// closure computed independently.
std::optional<std::string> check_connectivity_routes(CaseSampler& s);

/// One update step: direct and matrix forms agree, W rows are stochastic
/// with entries >= eta, hull and contraction-floor properties, translation
/// and scale equivariance.
std::optional<std::string> check_engine_step(CaseSampler& s);

/// A short arc-independent trial with invariant checks on reports no
/// violation.
std::optional<std::string> check_engine_trial(CaseSampler& s);

/// Runs `property` on cases 0..cases-1 seeded from (seed, property name).
SuiteReport run_property(const std::string& name, const Property& property,
                         std::uint32_t cases, std::uint64_t seed);

/// Named suites: "matrix", "graph", "engine". Throws InvalidInput for an
/// unknown name.
SuiteReport run_suite(const std::string& suite, std::uint32_t cases, std::uint64_t seed);

}  // namespace consensus_lab
