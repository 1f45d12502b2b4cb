#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/interval_ends.hpp"
#include "consensus_lab/schedule.hpp"

namespace consensus_lab {

inline constexpr std::uint64_t kDefaultSearchCap = 10'000'000;
inline constexpr std::uint64_t kDefaultMaxWindow = 10'000;

/// Inputs of the closed-form epsilon-computation-time bounds. Fields an
/// evaluator needs but finds unset make it throw InvalidInput naming the
/// field.
struct BoundQuery {
  int n = 2;
  double epsilon = 0.1;
  ProbabilitySchedule schedule = ProbabilitySchedule::constant(0.5);
  std::optional<double> eta;
  std::optional<double> q;
  std::optional<std::uint64_t> block_length;   ///< B
  std::optional<IntervalEnds> interval_ends;   ///< C_m
  std::optional<double> theta0;
  std::optional<std::uint64_t> basic_arc_count;  ///< |E*|
  /// Largest time value a search may return.
  std::uint64_t search_cap = kDefaultSearchCap;
  /// Largest window an infimum over schedule indices may scan.
  std::uint64_t max_window = kDefaultMaxWindow;
};

/// Partial sums at the point the search stopped.
struct BoundAudit {
  /// Number of terms summed (M, s or k of the defining inf/sup).
  std::uint64_t terms = 0;
  double sum = 0.0;
  /// Sum with one term fewer (upper bounds) or one more (lower bound); the
  /// threshold lies between the two.
  double adjacent_sum = 0.0;
  double threshold = 0.0;
  std::map<std::string, double> extra;
};

struct BoundResult {
  /// Empty when the defining set is empty up to search_cap.
  std::optional<std::uint64_t> value;
  BoundAudit audit;

  bool unbounded() const { return !value.has_value(); }
};

/// sup{k : sum_{i<k} log 1/(1-P_i) <= log(1/eps) / n}, a lower bound valid
/// for every graph process.
BoundResult tcom_lower_bound(const BoundQuery& qy);

/// Connectivity-independent processes with a non-increasing schedule:
/// (n-1)^2 * inf{M : sum_{i<M} -log(1 - (q eta)^{(n-1)^2}/2 * P_{(i+1)(n-1)^2}^{n-1})
/// >= log eps^-2}. Throws PreconditionError if the schedule increases anywhere.
BoundResult tcom_upper_connectivity_independent(const BoundQuery& qy);

/// Smallest product of r values of P over [begin, end). Exact for any
/// schedule (the r smallest values are selected). Throws ResourceError when
/// the window exceeds max_window, InvalidInput when it holds fewer than r
/// indices.
double window_min_product(const ProbabilitySchedule& s, std::uint64_t begin,
                          std::uint64_t end, int r,
                          std::uint64_t max_window = kDefaultMaxWindow);

/// Window infimum over [s (n-1)^2 B, (s+1)(n-1)^2 B) of products of n-1 values.
double pbar(const ProbabilitySchedule& sched, int n, std::uint64_t block_length,
            std::uint64_t s, std::uint64_t max_window = kDefaultMaxWindow);

/// Uniformly jointly connected processes with block length B:
/// (n-1)^2 B * inf{M : sum_{i<M} -log(1 - (q eta)^{(n-1)^2}/2 * pbar_i) >= log eps^-2}.
BoundResult tcom_upper_uniform_joint(const BoundQuery& qy);

/// Window infimum over [C_{s(n-1)}, C_{(s+1)(n-1)}) of products of n-1 values.
double phat(const ProbabilitySchedule& sched, int n, const IntervalEnds& ends,
            std::uint64_t s, std::uint64_t max_window = kDefaultMaxWindow);

/// Bidirectional, infinitely jointly connected processes:
/// inf{C_{s(n-1)} : sum_{i<s} -log(1 - (q eta)^{n-1} * phat_i) >= log eps^-2}.
BoundResult tcom_upper_bidirectional(const BoundQuery& qy);

/// min P_k over [C_s, C_{s+1}).
double ptilde(const ProbabilitySchedule& sched, const IntervalEnds& ends,
              std::uint64_t s, std::uint64_t max_window = kDefaultMaxWindow);

/// Arc-independent processes:
/// inf{k : sum_{i<k} (1 - (1-P_i)^n) >= ((n-1)|E*| / log A) log(A eps^2 / n)}
/// with A = 1 - (eta theta0 / n)^{(n-1)|E*|}.
BoundResult tcom_upper_arc_independent(const BoundQuery& qy);

enum class SufficiencyCondition {
  /// sum P_k^{n-1} = inf, non-increasing schedule (connectivity-independent
  /// or uniformly joint processes).
  power_sum_uniform,
  /// sum_s P_{C_{s(n-1)}}^{n-1} = inf, non-increasing (bidirectional).
  bidirectional_subsequence,
  /// sum_m P_{C_m} = inf, non-increasing (acyclic, infinitely joint).
  acyclic_infinite,
  /// sum P_k = inf with B = 1 or a non-increasing schedule (acyclic,
  /// uniformly joint); necessary as well.
  acyclic_uniform,
  /// sum P_k = inf (arc-independent); necessary as well.
  arc_independent,
};

struct SufficiencyInputs {
  ProbabilitySchedule schedule = ProbabilitySchedule::constant(0.5);
  int n = 2;
  std::optional<IntervalEnds> interval_ends;
  std::uint64_t block_length = 1;
};

/// Whether the divergence condition holds together with its schedule
/// hypothesis. A monotonicity hypothesis that fails makes the answer false.
bool check_sufficiency(SufficiencyCondition condition, const SufficiencyInputs& in);

std::string to_string(SufficiencyCondition c);

}  // namespace consensus_lab
