#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/graph_process.hpp"
#include "consensus_lab/schedule.hpp"

namespace consensus_lab {

struct InitialCondition {
  std::string name;
  StateVector x;
};

/// e1 (node 1 at 1, rest 0), alternating +1/-1, and a linear ramp over
/// [0, 1]. Used in place of the supremum over all initial states.
std::vector<InitialCondition> default_initial_conditions(int n);

struct ExperimentSpec {
  GraphProcess process;
  ProbabilitySchedule schedule;
  WeightRule rule;
  std::vector<InitialCondition> initial_conditions;
  std::uint64_t horizon = 100000;
  double tol = 1e-6;
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  std::optional<double> epsilon;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

enum class InvariantChecks { none, spot, all };

struct RunOptions {
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// spot checks every trial whose index is a multiple of 100.
  InvariantChecks checks = InvariantChecks::spot;
};

struct TrialSummary {
  std::optional<std::uint64_t> hit_time;
  std::optional<std::uint64_t> epsilon_time;
  std::uint64_t steps_run = 0;
  std::uint64_t update_events = 0;
  bool checked = false;
  std::uint64_t violations = 0;
  std::string first_violation;
};

struct ExperimentResult {
  /// trials[c][t]: trial t of initial condition c. Its rng trial coordinate
  /// is c * spec.trials + t.
  std::vector<std::vector<TrialSummary>> trials;
  std::uint64_t checked_trials = 0;
  std::uint64_t violations = 0;
  std::string first_violation;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options);

struct ConsensusEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

ConsensusEstimate make_estimate(std::uint64_t successes, std::uint64_t trials);

struct ConsensusReport {
  std::vector<std::string> names;
  std::vector<ConsensusEstimate> per_condition;
  ConsensusEstimate pooled;
};

ConsensusReport summarize_consensus(const ExperimentSpec& spec,
                                    const ExperimentResult& result);

struct TcomEstimate {
  double epsilon = 0.0;
  std::vector<std::string> names;
  /// Empty entries are censored at the horizon.
  std::vector<std::optional<std::uint64_t>> per_condition;
  /// Max over the dictionary; empty if any condition is censored.
  std::optional<std::uint64_t> t_hat;
};

/// Smallest k with #{trials whose H(k)/H(0) >= eps} <= eps * trials, taken
/// from exact per-trial passage times. Empty when the horizon is too short.
std::optional<std::uint64_t> empirical_tcom(
    const std::vector<std::optional<std::uint64_t>>& passage_times, double epsilon);

/// Requires spec.epsilon.
TcomEstimate summarize_tcom(const ExperimentSpec& spec, const ExperimentResult& result);

ConsensusReport estimate_consensus_probability(const ExperimentSpec& spec,
                                               const RunOptions& options);
TcomEstimate estimate_tcom(const ExperimentSpec& spec, const RunOptions& options);

enum class SweepParam { beta, c, q, theta0, a_star, epsilon };

/// Throws InvalidInput for unknown names.
SweepParam parse_sweep_param(const std::string& name);
std::string to_string(SweepParam p);

/// Copy of the spec with one parameter replaced. Throws InvalidInput when
/// the spec has no such parameter (e.g. beta on a constant schedule).
ExperimentSpec with_param(const ExperimentSpec& base, SweepParam param, double value);

struct SweepRow {
  double value = 0.0;
  ConsensusEstimate estimate;
  /// Fraction of trials whose epsilon passage (or, without epsilon, whose
  /// consensus hit) did not happen within the horizon.
  double censored_fraction = 0.0;
  std::optional<std::uint64_t> t_hat;
  std::uint64_t violations = 0;
};

/// One row per value, sorted by value.
std::vector<SweepRow> parameter_sweep(const ExperimentSpec& base, SweepParam param,
                                      std::vector<double> values,
                                      const RunOptions& options);

/// parameter_sweep over beta with `trials` trials per point; the schedule
/// must be power_decay.
std::vector<SweepRow> threshold_sweep(const ExperimentSpec& base,
                                      std::vector<double> betas, std::uint64_t trials,
                                      const RunOptions& options);

}  // namespace consensus_lab
