#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/bounds.hpp"
#include "consensus_lab/json_io.hpp"
#include "consensus_lab/montecarlo.hpp"

namespace consensus_lab::cli {

struct BoundsBlock {
  std::optional<double> eta;
  std::optional<double> q;
  std::optional<std::uint64_t> block_length;
  std::optional<IntervalEnds> interval_ends;
  std::optional<double> theta0;
  std::optional<std::uint64_t> basic_arc_count;
  std::uint64_t search_cap = kDefaultSearchCap;
  std::uint64_t max_window = kDefaultMaxWindow;
};

struct OutputBlock {
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool dump_graphs = false;
};

/// A schema-checked config document. Every section is optional at parse
/// time; the accessors below demand what each subcommand needs.
struct Config {
  Json document;
  std::optional<int> n;
  std::optional<GraphProcess> process;
  std::optional<ProbabilitySchedule> schedule;
  std::optional<WeightRule> rule;
  std::optional<std::vector<InitialCondition>> initial_conditions;
  std::uint64_t horizon = 100000;
  double tol = 1e-6;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;
  BoundsBlock bounds;
  OutputBlock output;

  /// Throws ConfigError naming the first missing or inconsistent key.
  ExperimentSpec experiment() const;
  /// eta falls back to the rule's eta when the bounds block has none.
  BoundQuery bound_query() const;
  /// Needs n and schedule; epsilon is not used.
  SufficiencyInputs sufficiency_inputs() const;
};

/// Throws ConfigError for unknown keys, wrong types or invalid values.
Config parse_config(const Json& document);

/// Reads and parses a file; unreadable files and JSON syntax errors are
/// reported as ConfigError.
Config load_config(const std::string& path);

}  // namespace consensus_lab::cli
