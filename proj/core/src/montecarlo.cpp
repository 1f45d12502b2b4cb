#include "consensus_lab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/statistics.hpp"

namespace consensus_lab {
namespace {

constexpr std::uint64_t kSpotCheckStride = 100;

unsigned resolve_threads(unsigned requested, std::uint64_t jobs) {
  unsigned t = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(jobs, 1)));
}

template <class Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<InitialCondition> default_initial_conditions(int n) {
  if (n < 1) throw InvalidInput("initial conditions need n >= 1");
  StateVector e1(static_cast<std::size_t>(n), 0.0);
  e1[0] = 1.0;
  StateVector alt(static_cast<std::size_t>(n));
  StateVector ramp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    alt[static_cast<std::size_t>(i)] = i % 2 == 0 ? 1.0 : -1.0;
    ramp[static_cast<std::size_t>(i)] = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
  }
  return {{"e1", e1}, {"alternating", alt}, {"ramp", ramp}};
}

void ExperimentSpec::validate() const {
  const int n = process.node_count();
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (horizon < 1) throw InvalidInput("horizon must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidInput("tol must lie in (0, 1)");
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
  if (initial_conditions.empty()) {
    throw InvalidInput("initial_conditions must not be empty");
  }
  bool spread = false;
  for (const auto& ic : initial_conditions) {
    if (static_cast<int>(ic.x.size()) != n) {
      throw InvalidInput("initial_conditions: '" + ic.name + "' has " +
                         std::to_string(ic.x.size()) + " entries, expected " +
                         std::to_string(n));
    }
    for (double v : ic.x) {
      if (!std::isfinite(v)) {
        throw InvalidInput("initial_conditions: '" + ic.name + "' is not finite");
      }
    }
    spread = spread || consensus_measure(ic.x) > 0.0;
  }
  if (!spread) {
    throw InvalidInput("initial_conditions: at least one needs H(0) > 0");
  }
  const std::uint64_t total = trials * initial_conditions.size();
  if (total / initial_conditions.size() != trials ||
      total > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidInput("trials times initial conditions exceeds 2^32");
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const std::uint64_t per = spec.trials;
  const std::uint64_t total = per * spec.initial_conditions.size();
  ExperimentResult result;
  result.trials.assign(spec.initial_conditions.size(),
                       std::vector<TrialSummary>(static_cast<std::size_t>(per)));
  const RngStream master(spec.master_seed, 0);

  parallel_for(total, resolve_threads(options.threads, total), [&](std::uint64_t idx) {
    const std::uint64_t c = idx / per;
    const std::uint64_t t = idx % per;
    TrialOptions to;
    to.horizon = spec.horizon;
    to.tol = spec.tol;
    to.epsilon = spec.epsilon;
    to.record_h = false;
    to.record_psi = false;
    to.check_invariants =
        options.checks == InvariantChecks::all ||
        (options.checks == InvariantChecks::spot && idx % kSpotCheckStride == 0);
    const TrialRecord rec =
        run_trial(spec.process, spec.schedule, spec.rule,
                  spec.initial_conditions[static_cast<std::size_t>(c)].x, to,
                  master.for_trial(static_cast<std::uint32_t>(idx)));
    TrialSummary& s = result.trials[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
    s.hit_time = rec.hit_time;
    s.epsilon_time = rec.epsilon_time;
    s.steps_run = rec.steps_run;
    s.update_events = rec.update_events;
    s.checked = to.check_invariants;
    s.violations = rec.violations;
    s.first_violation = rec.first_violation;
  });

  for (const auto& per_ic : result.trials) {
    for (const auto& s : per_ic) {
      result.checked_trials += s.checked ? 1 : 0;
      if (s.violations > 0 && result.violations == 0) {
        result.first_violation = s.first_violation;
      }
      result.violations += s.violations;
    }
  }
  return result;
}

ConsensusEstimate make_estimate(std::uint64_t successes, std::uint64_t trials) {
  ConsensusEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.p_hat = trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  const Interval ci = wilson_interval(successes, trials);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  return e;
}

ConsensusReport summarize_consensus(const ExperimentSpec& spec,
                                    const ExperimentResult& result) {
  ConsensusReport r;
  std::uint64_t all_hits = 0;
  std::uint64_t all_trials = 0;
  for (std::size_t c = 0; c < result.trials.size(); ++c) {
    const auto& per_ic = result.trials[c];
    const auto hits = static_cast<std::uint64_t>(std::count_if(
        per_ic.begin(), per_ic.end(), [](const TrialSummary& s) { return s.hit_time.has_value(); }));
    r.names.push_back(spec.initial_conditions[c].name);
    r.per_condition.push_back(make_estimate(hits, per_ic.size()));
    all_hits += hits;
    all_trials += per_ic.size();
  }
  r.pooled = make_estimate(all_hits, all_trials);
  return r;
}

std::optional<std::uint64_t> empirical_tcom(
    const std::vector<std::optional<std::uint64_t>>& passage_times, double epsilon) {
  if (passage_times.empty()) return std::nullopt;
  const auto n = passage_times.size();
  // At most `allowed` trials may still be at or above eps * H(0).
  const auto allowed = static_cast<std::size_t>(
      std::floor(epsilon * static_cast<double>(n)));
  if (allowed >= n) return 0;
  std::vector<std::uint64_t> times;
  times.reserve(n);
  for (const auto& t : passage_times) {
    times.push_back(t ? *t : std::numeric_limits<std::uint64_t>::max());
  }
  const std::size_t pos = n - allowed - 1;
  std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(pos), times.end());
  if (times[pos] == std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return times[pos];
}

TcomEstimate summarize_tcom(const ExperimentSpec& spec, const ExperimentResult& result) {
  if (!spec.epsilon) throw InvalidInput("estimating T_com needs epsilon");
  TcomEstimate e;
  e.epsilon = *spec.epsilon;
  bool censored = false;
  std::uint64_t worst = 0;
  for (std::size_t c = 0; c < result.trials.size(); ++c) {
    std::vector<std::optional<std::uint64_t>> times;
    times.reserve(result.trials[c].size());
    for (const auto& s : result.trials[c]) times.push_back(s.epsilon_time);
    const auto t = empirical_tcom(times, e.epsilon);
    e.names.push_back(spec.initial_conditions[c].name);
    e.per_condition.push_back(t);
    if (t) {
      worst = std::max(worst, *t);
    } else {
      censored = true;
    }
  }
  if (!censored) e.t_hat = worst;
  return e;
}

ConsensusReport estimate_consensus_probability(const ExperimentSpec& spec,
                                               const RunOptions& options) {
  return summarize_consensus(spec, run_experiment(spec, options));
}

TcomEstimate estimate_tcom(const ExperimentSpec& spec, const RunOptions& options) {
  if (!spec.epsilon) throw InvalidInput("estimating T_com needs epsilon");
  return summarize_tcom(spec, run_experiment(spec, options));
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "beta") return SweepParam::beta;
  if (name == "c") return SweepParam::c;
  if (name == "q") return SweepParam::q;
  if (name == "theta0") return SweepParam::theta0;
  if (name == "a_star") return SweepParam::a_star;
  if (name == "epsilon") return SweepParam::epsilon;
  throw InvalidInput("unknown sweep parameter '" + name + "'");
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::beta: return "beta";
    case SweepParam::c: return "c";
    case SweepParam::q: return "q";
    case SweepParam::theta0: return "theta0";
    case SweepParam::a_star: return "a_star";
    case SweepParam::epsilon: return "epsilon";
  }
  return "unknown";
}

ExperimentSpec with_param(const ExperimentSpec& base, SweepParam param, double value) {
  ExperimentSpec s = base;
  switch (param) {
    case SweepParam::beta: {
      const auto* pd = std::get_if<PowerDecaySchedule>(&base.schedule.params());
      if (!pd) throw InvalidInput("sweeping beta needs a power_decay schedule");
      s.schedule = ProbabilitySchedule::power_decay(pd->c, value, pd->cap);
      break;
    }
    case SweepParam::c:
      if (const auto* pd = std::get_if<PowerDecaySchedule>(&base.schedule.params())) {
        s.schedule = ProbabilitySchedule::power_decay(value, pd->beta, pd->cap);
      } else if (const auto* g = std::get_if<GeometricSchedule>(&base.schedule.params())) {
        s.schedule = ProbabilitySchedule::geometric(value, g->rho, g->cap);
      } else {
        throw InvalidInput("sweeping c needs a power_decay or geometric schedule");
      }
      break;
    case SweepParam::q:
      s.process = base.process.with_q(value);
      break;
    case SweepParam::theta0:
      s.process = base.process.with_uniform_theta(value);
      break;
    case SweepParam::a_star:
      s.rule = WeightRule::self_confident(value);
      break;
    case SweepParam::epsilon:
      s.epsilon = value;
      break;
  }
  s.validate();
  return s;
}

std::vector<SweepRow> parameter_sweep(const ExperimentSpec& base, SweepParam param,
                                      std::vector<double> values,
                                      const RunOptions& options) {
  if (values.empty()) throw InvalidInput("sweep needs at least one value");
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    const ExperimentSpec spec = with_param(base, param, v);
    const ExperimentResult result = run_experiment(spec, options);
    SweepRow row;
    row.value = v;
    row.estimate = summarize_consensus(spec, result).pooled;
    std::uint64_t censored = 0;
    for (const auto& per_ic : result.trials) {
      for (const auto& t : per_ic) {
        const bool open = spec.epsilon ? !t.epsilon_time : !t.hit_time;
        censored += open ? 1 : 0;
      }
    }
    row.censored_fraction =
        static_cast<double>(censored) / static_cast<double>(row.estimate.trials);
    if (spec.epsilon) row.t_hat = summarize_tcom(spec, result).t_hat;
    row.violations = result.violations;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> threshold_sweep(const ExperimentSpec& base,
                                      std::vector<double> betas, std::uint64_t trials,
                                      const RunOptions& options) {
  ExperimentSpec spec = base;
  spec.trials = trials;
  return parameter_sweep(spec, SweepParam::beta, std::move(betas), options);
}

}  // namespace consensus_lab
