#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "consensus_lab/digraph.hpp"
#include "consensus_lab/interval_ends.hpp"
#include "consensus_lab/rng.hpp"

namespace consensus_lab {

/// Each arc of `basic_graph` is present at each step independently with its
/// own probability; no other arc ever appears.
struct ArcIndependentProcess {
  Digraph basic_graph;
  /// One probability per arc, aligned with basic_graph.arcs().
  std::vector<double> theta;
  double theta_floor = 0.0;
};

/// Rooted draws: a uniformly random root, a random recursive arborescence
/// over a random node order, plus every other arc with extra_arc_prob.
struct RootedSampler {
  double extra_arc_prob = 0.0;
};

/// Filler draws: independent arcs with arc_prob. With exclude_connected the
/// draw is rejection-sampled to be not quasi-strongly connected (falling back
/// to the empty graph), so the rooted probability is exactly q.
struct FillerSampler {
  double arc_prob = 0.0;
  bool exclude_connected = true;
};

/// Per step: rooted draw with probability q, filler draw otherwise,
/// independently across steps.
struct ConnectivityIndependentProcess {
  int n = 1;
  double q = 0.5;
  RootedSampler rooted;
  FillerSampler filler;
};

/// Blocks [mB, (m+1)B): with probability q a random arborescence is drawn and
/// each of its arcs lands on a uniformly random step of the block; otherwise
/// the whole block is empty.
struct UniformlyJointProcess {
  int n = 1;
  std::uint64_t block_length = 1;
  double q = 0.5;
};

/// As UniformlyJointProcess, with blocks [C_m, C_{m+1}) of growing length.
struct InfinitelyJointProcess {
  int n = 1;
  IntervalEnds interval_ends = IntervalEnds::unit();
  double q = 0.5;
};

class GraphProcess;

/// Every draw of the inner process is symmetrized.
struct BidirectionalProcess {
  std::shared_ptr<const GraphProcess> inner;
};

/// Arc-independent draws over an acyclic quasi-strongly connected basic graph;
/// the joint graph over any horizon stays acyclic.
struct AcyclicRestrictedProcess {
  Digraph basic_graph;
  std::vector<double> theta;
  double theta_floor = 0.0;
};

enum class ProcessKind {
  arc_independent,
  connectivity_independent,
  uniformly_joint,
  infinitely_joint,
  bidirectional,
  acyclic_restricted,
};

std::string to_string(ProcessKind kind);

/// A seeded generator of random digraphs G_0, G_1, .... Immutable; sampling
/// is a pure function of (process, k, rng coordinates).
class GraphProcess {
 public:
  using Params =
      std::variant<ArcIndependentProcess, ConnectivityIndependentProcess,
                   UniformlyJointProcess, InfinitelyJointProcess,
                   BidirectionalProcess, AcyclicRestrictedProcess>;

  /// Validates the parameters; throws InvalidInput on violations.
  explicit GraphProcess(Params params);

  static GraphProcess arc_independent(Digraph basic, double theta,
                                      double theta_floor);
  static GraphProcess arc_independent(Digraph basic, std::vector<double> theta,
                                      double theta_floor);
  static GraphProcess bidirectional(GraphProcess inner);

  ProcessKind kind() const { return static_cast<ProcessKind>(params_.index()); }
  const Params& params() const { return params_; }
  int node_count() const;

  Digraph sample(std::uint64_t k, const RngStream& rng) const;

  /// True when connectivity is promised per block or interval rather than
  /// per step.
  bool is_interval_based() const;

  /// Steps [start, end) making up time unit `unit`: one step for step-based
  /// kinds, one block or interval otherwise.
  std::pair<std::uint64_t, std::uint64_t> unit_bounds(std::uint64_t unit) const;

  /// Returns a copy with a parameter replaced; used by parameter sweeps.
  /// Throws InvalidInput if the process has no such parameter.
  GraphProcess with_q(double q) const;
  GraphProcess with_uniform_theta(double theta) const;

 private:
  Params params_;
};

/// Random rooted arborescence used by the rooted samplers. `time` and the
/// tag family select the coordinates; exposed for tests.
Digraph random_arborescence(int n, std::uint64_t time, const RngStream& rng);

struct ArcFrequency {
  Arc arc;
  double declared = 0.0;
  double empirical = 0.0;
};

/// Empirical check of a process's class hypotheses.
struct ClassDiagnostics {
  std::uint64_t draws = 0;
  std::string unit;              ///< "step" or "interval"
  double qsc_frequency = 0.0;    ///< fraction of units whose graph is rooted
  double qsc_ci_low = 0.0;       ///< 95% Wilson interval
  double qsc_ci_high = 0.0;
  double qsc_lag1_correlation = 0.0;
  std::vector<ArcFrequency> arc_frequencies;  ///< arc-based kinds only
  double max_arc_deviation = 0.0;
  double max_abs_arc_lag1_correlation = 0.0;
  bool bidirectional_always = true;
  bool joint_acyclic = true;     ///< union of all draws acyclic
};

/// draws >= 1000 time units; uses trial coordinate rng.trial().
ClassDiagnostics verify_class(const GraphProcess& p, std::uint64_t draws,
                              const RngStream& rng);

/// Pearson lag-1 correlation of a 0/1 sequence; 0 when either side is
/// constant.
double lag1_correlation(const std::vector<std::uint8_t>& indicators);

}  // namespace consensus_lab
