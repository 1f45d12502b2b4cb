#include "consensus_lab/consensus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {
namespace {

constexpr double kAgreementTolerance = 1e-12;

double abs_scale(std::span<const double> x) {
  double s = 1.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

NodeMask neighborhood(const Digraph& g, int i) {
  return g.in_neighbors(i) | (NodeMask{1} << i);
}

/// Weighted average over N_i in ascending index order, clamped to the
/// neighborhood's range.
double averaged_value(std::span<const double> x, const Digraph& g,
                      const WeightRule& rule, int i) {
  const NodeMask nb = neighborhood(g, i);
  const int size = std::popcount(nb);
  if (size == 1) return x[static_cast<std::size_t>(i)];
  double own = 0.0;
  double other = 0.0;
  if (rule.kind() == WeightKind::equal_weights) {
    own = other = 1.0 / size;
  } else {
    own = rule.a_star();
    other = (1.0 - rule.a_star()) / (size - 1);
  }
  double acc = 0.0;
  double lo = x[static_cast<std::size_t>(i)];
  double hi = lo;
  for (NodeMask m = nb; m != 0; m &= m - 1) {
    const int j = std::countr_zero(m);
    const double v = x[static_cast<std::size_t>(j)];
    acc += (j == i ? own : other) * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return std::clamp(acc, lo, hi);
}

class ViolationLog {
 public:
  explicit ViolationLog(TrialRecord& r) : r_(r) {}

  void fail(std::uint64_t k, const std::string& what) {
    if (r_.violations++ == 0) {
      std::ostringstream os;
      os << "step " << k << ": " << what;
      r_.first_violation = os.str();
    }
  }

 private:
  TrialRecord& r_;
};

struct Range {
  double lo;
  double hi;
};

Range range_of(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {*lo, *hi};
}

void check_step(std::uint64_t k, std::span<const double> before,
                std::span<const double> after, const Digraph& g,
                const WeightRule& rule, SuccessMask success, ViolationLog& log) {
  const int n = static_cast<int>(before.size());
  const StepResult ref = step(before, g, rule, success);
  const double scale = abs_scale(before);
  const double eta = rule.eta(n);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (std::abs(ref.state[ui] - after[ui]) > kAgreementTolerance * scale) {
      log.fail(k, "direct update of node " + std::to_string(i) +
                      " disagrees with W*x");
    }
    const bool updated = (success >> i) & 1U;
    if (!updated && after[ui] != before[ui]) {
      log.fail(k, "node " + std::to_string(i) + " changed without success");
    }
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = ref.w(i, j);
      sum += w;
      if (w != 0.0 && w < eta * (1.0 - kAgreementTolerance)) {
        log.fail(k, "W entry below eta in row " + std::to_string(i));
      }
      if (!updated && w != (i == j ? 1.0 : 0.0)) {
        log.fail(k, "row " + std::to_string(i) + " of W is not e_i");
      }
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      log.fail(k, "row " + std::to_string(i) + " of W is not stochastic");
    }
  }
}

}  // namespace

WeightRule WeightRule::self_confident(double a_star) {
  if (!(a_star > 0.5 && a_star < 1.0)) {
    throw InvalidInput("a_star must lie in (1/2, 1), got " + std::to_string(a_star));
  }
  return WeightRule(WeightKind::self_confident, a_star);
}

double WeightRule::eta(int n) const {
  if (n <= 1) return 1.0;
  if (kind_ == WeightKind::equal_weights) return 1.0 / n;
  return std::min(a_star_, (1.0 - a_star_) / (n - 1));
}

void WeightRule::row(const Digraph& g, int i, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const NodeMask nb = neighborhood(g, i);
  const int size = std::popcount(nb);
  if (size == 1) {
    out[static_cast<std::size_t>(i)] = 1.0;
    return;
  }
  const double own = kind_ == WeightKind::equal_weights ? 1.0 / size : a_star_;
  const double other =
      kind_ == WeightKind::equal_weights ? 1.0 / size : (1.0 - a_star_) / (size - 1);
  for (NodeMask m = nb; m != 0; m &= m - 1) {
    const int j = std::countr_zero(m);
    out[static_cast<std::size_t>(j)] = j == i ? own : other;
  }
}

std::string to_string(WeightKind kind) {
  return kind == WeightKind::equal_weights ? "equal_weights" : "self_confident";
}

StochasticMatrix build_weights(const Digraph& g, const WeightRule& rule) {
  const int n = g.size();
  std::vector<double> entries(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    rule.row(g, i, std::span<double>(entries).subspan(static_cast<std::size_t>(i * n),
                                                      static_cast<std::size_t>(n)));
  }
  return StochasticMatrix(n, std::move(entries));
}

double consensus_measure(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const Range r = range_of(x);
  return r.hi - r.lo;
}

StepResult step(std::span<const double> x, const Digraph& g, const WeightRule& rule,
                SuccessMask success) {
  const int n = g.size();
  if (static_cast<int>(x.size()) != n) {
    throw InvalidInput("state length does not match graph size");
  }
  std::vector<double> entries(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    auto row = std::span<double>(entries).subspan(static_cast<std::size_t>(i * n),
                                                  static_cast<std::size_t>(n));
    if ((success >> i) & 1U) {
      rule.row(g, i, row);
    } else {
      row[static_cast<std::size_t>(i)] = 1.0;
    }
  }
  StochasticMatrix w(n, std::move(entries));
  StateVector next = w.apply(x);
  return {std::move(next), std::move(w)};
}

void apply_update(std::span<double> x, const Digraph& g, const WeightRule& rule,
                  SuccessMask success, std::span<double> scratch) {
  std::copy(x.begin(), x.end(), scratch.begin());
  const std::span<const double> old(scratch.data(), x.size());
  for (SuccessMask m = success; m != 0; m &= m - 1) {
    const int i = std::countr_zero(m);
    x[static_cast<std::size_t>(i)] = averaged_value(old, g, rule, i);
  }
}

SuccessMask draw_successes(int n, double p, std::uint64_t k, const RngStream& rng) {
  if (p <= 0.0) return 0;
  SuccessMask mask = 0;
  for (int i = 0; i < n; ++i) {
    if (rng.bernoulli(p, k, static_cast<std::uint32_t>(i), StreamTag::node_success)) {
      mask |= SuccessMask{1} << i;
    }
  }
  return mask;
}

bool RecordingGrid::records(std::uint64_t k) {
  if (k <= kDenseSteps) return true;
  if (k < next_) return false;
  gap_ *= 1.05;
  next_ = k + static_cast<std::uint64_t>(std::ceil(gap_));
  return true;
}

TrialRecord run_trial(const GraphProcess& p, const ProbabilitySchedule& s,
                      const WeightRule& rule, std::span<const double> x0,
                      const TrialOptions& options, const RngStream& rng) {
  const int n = p.node_count();
  if (static_cast<int>(x0.size()) != n) {
    throw InvalidInput("initial state has " + std::to_string(x0.size()) +
                       " entries, process has " + std::to_string(n) + " nodes");
  }
  if (options.horizon < 1) throw InvalidInput("horizon must be >= 1");
  if (!(options.tol > 0.0 && options.tol < 1.0)) {
    throw InvalidInput("tol must lie in (0, 1)");
  }
  if (options.epsilon && !(*options.epsilon > 0.0 && *options.epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
  for (double v : x0) {
    if (!std::isfinite(v)) throw InvalidInput("initial state must be finite");
  }

  TrialRecord rec;
  ViolationLog log(rec);
  StateVector x(x0.begin(), x0.end());
  StateVector before(x.size());
  StateVector scratch(x.size());
  const SuccessMask all_nodes =
      n == 64 ? ~SuccessMask{0} : (SuccessMask{1} << n) - 1;
  const bool floor_checks =
      options.check_invariants && rule.kind() == WeightKind::self_confident;
  const double contraction = 2.0 * rule.a_star() - 1.0;

  double h = consensus_measure(x);
  rec.h0 = h;
  RecordingGrid grid;
  if (options.record_h) {
    rec.recorded_steps.push_back(0);
    rec.h_seq.push_back(h);
  }
  if (h == 0.0) {
    rec.hit_time = 0;
    if (options.epsilon) rec.epsilon_time = 0;
  }
  auto passages_known = [&] {
    return rec.hit_time.has_value() &&
           (!options.epsilon || rec.epsilon_time.has_value());
  };

  std::uint64_t k = 0;
  for (; k < options.horizon; ++k) {
    if (options.stop_at_hit && passages_known()) break;

    const SuccessMask success =
        (options.success_override ? options.success_override(k)
                                  : draw_successes(n, s.value(k), k, rng)) &
        all_nodes;
    std::optional<Digraph> g;
    if (options.graph_observer) {
      g = p.sample(k, rng);
      options.graph_observer(k, *g);
    }
    const bool psi = success != 0;
    if (options.record_psi) rec.psi_seq.push_back(psi ? 1 : 0);
    if (!psi) {
      if (options.record_h && grid.records(k + 1)) {
        rec.recorded_steps.push_back(k + 1);
        rec.h_seq.push_back(h);
      }
      continue;
    }

    ++rec.update_events;
    if (!g) g = p.sample(k, rng);
    if (options.check_invariants) before = x;
    apply_update(x, *g, rule, success, scratch);
    const double h_prev = h;
    h = consensus_measure(x);

    if (options.check_invariants) {
      check_step(k, before, x, *g, rule, success, log);
      const Range r0 = range_of(before);
      const Range r1 = range_of(x);
      if (r1.hi > r0.hi) log.fail(k, "max state increased");
      if (r1.lo < r0.lo) log.fail(k, "min state decreased");
      if (floor_checks) {
        const double scale = abs_scale(before);
        if (h < contraction * h_prev - kAgreementTolerance * scale) {
          log.fail(k, "contraction below (2a*-1) floor");
        }
        const double floor_all =
            rec.h0 * std::pow(contraction, static_cast<double>(rec.update_events));
        if (h < floor_all * (1.0 - kAgreementTolerance) -
                    kAgreementTolerance * scale *
                        static_cast<double>(rec.update_events)) {
          log.fail(k, "H fell below (2a*-1)^U * H(0)");
        }
      }
    }

    if (options.record_h && grid.records(k + 1)) {
      rec.recorded_steps.push_back(k + 1);
      rec.h_seq.push_back(h);
    }
    if (!rec.hit_time && h <= options.tol * rec.h0) rec.hit_time = k + 1;
    if (options.epsilon && !rec.epsilon_time && h < *options.epsilon * rec.h0) {
      rec.epsilon_time = k + 1;
    }
  }

  rec.steps_run = k;
  if (options.record_h && rec.recorded_steps.back() != k) {
    rec.recorded_steps.push_back(k);
    rec.h_seq.push_back(h);
  }
  rec.final_state = std::move(x);
  return rec;
}

}  // namespace consensus_lab
