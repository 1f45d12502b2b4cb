#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consensus_lab/digraph.hpp"
#include "consensus_lab/graph_process.hpp"
#include "consensus_lab/rng.hpp"
#include "consensus_lab/schedule.hpp"
#include "consensus_lab/stochastic_matrix.hpp"

namespace consensus_lab {

using StateVector = std::vector<double>;

/// Bit i set when node i succeeds in its Bernoulli trial.
using SuccessMask = std::uint64_t;

enum class WeightKind { equal_weights, self_confident };

/// How a node spreads weight over N_i = in-neighbors plus itself.
///   equal_weights:  a_ij = 1 / |N_i|
///   self_confident: a_ii = a_star, the rest (1 - a_star) / (|N_i| - 1)
class WeightRule {
 public:
  static WeightRule equal_weights() { return WeightRule(WeightKind::equal_weights, 0.0); }
  /// Throws InvalidInput unless 1/2 < a_star < 1.
  static WeightRule self_confident(double a_star);

  WeightKind kind() const { return kind_; }
  double a_star() const { return a_star_; }

  /// Smallest positive weight the rule can produce on n nodes.
  double eta(int n) const;

  /// Weights of node i; entry j is zero outside N_i.
  void row(const Digraph& g, int i, std::span<double> out) const;

 private:
  WeightRule(WeightKind kind, double a_star) : kind_(kind), a_star_(a_star) {}

  WeightKind kind_;
  double a_star_;
};

std::string to_string(WeightKind kind);

/// Dense weight rows of every node, as a stochastic matrix.
StochasticMatrix build_weights(const Digraph& g, const WeightRule& rule);

/// max(x) - min(x); 0 for an empty vector.
double consensus_measure(std::span<const double> x);

struct StepResult {
  StateVector state;
  StochasticMatrix w;
};

/// One synchronous update. Row i of w is the weight row if node i succeeded
/// and e_i otherwise; state == w * x.
StepResult step(std::span<const double> x, const Digraph& g, const WeightRule& rule,
                SuccessMask success);

/// In-place form of step without materializing W. Each updated value is
/// clamped to the [min, max] of its neighborhood so rounding can never push
/// it outside the convex hull.
void apply_update(std::span<double> x, const Digraph& g, const WeightRule& rule,
                  SuccessMask success, std::span<double> scratch);

struct TrialOptions {
  std::uint64_t horizon = 100000;
  /// hit_time is the first k with H(k) <= tol * H(0).
  double tol = 1e-6;
  /// When set, epsilon_time is the first k with H(k) < epsilon * H(0).
  std::optional<double> epsilon;
  /// Stop as soon as every requested passage time is known.
  bool stop_at_hit = true;
  bool check_invariants = false;
  bool record_h = true;
  bool record_psi = true;
  /// Called with every sampled graph. When set the graph is drawn every
  /// step, otherwise only on steps where some node succeeds.
  std::function<void(std::uint64_t, const Digraph&)> graph_observer;
  /// Overrides the Bernoulli draws; used by tests.
  std::function<SuccessMask(std::uint64_t)> success_override;
};

struct TrialRecord {
  /// Steps at which H was recorded: dense up to 10^4, then with gaps
  /// ceil(1.05^m). Always contains 0 and steps_run.
  std::vector<std::uint64_t> recorded_steps;
  std::vector<double> h_seq;
  /// psi_seq[k] = 1 when some node succeeded at step k, for k < steps_run.
  std::vector<std::uint8_t> psi_seq;
  std::optional<std::uint64_t> hit_time;
  std::optional<std::uint64_t> epsilon_time;
  StateVector final_state;
  double h0 = 0.0;
  std::uint64_t steps_run = 0;
  std::uint64_t update_events = 0;
  std::uint64_t violations = 0;
  std::string first_violation;
};

/// Simulates one trajectory of the gated averaging dynamics. Graph draws
/// use coordinates (trial, k, arc) and node coins (trial, k, node).
TrialRecord run_trial(const GraphProcess& p, const ProbabilitySchedule& s,
                      const WeightRule& rule, std::span<const double> x0,
                      const TrialOptions& options, const RngStream& rng);

/// Per-node Bernoulli(P_k) draws at step k.
SuccessMask draw_successes(int n, double p, std::uint64_t k, const RngStream& rng);

/// Whether step k is kept in a TrialRecord's subsampled H sequence.
class RecordingGrid {
 public:
  static constexpr std::uint64_t kDenseSteps = 10000;

  bool records(std::uint64_t k);

 private:
  std::uint64_t next_ = kDenseSteps;
  double gap_ = 1.0;
};

}  // namespace consensus_lab
