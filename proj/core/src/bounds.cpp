#include "consensus_lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "consensus_lab/errors.hpp"

namespace consensus_lab {
namespace {

template <class T>
const T& require(const std::optional<T>& v, const char* name) {
  if (!v) throw InvalidInput(std::string("bound needs parameter '") + name + "'");
  return *v;
}

void validate_common(const BoundQuery& qy) {
  if (qy.n < 2) throw InvalidInput("bounds need n >= 2");
  if (!(qy.epsilon > 0.0 && qy.epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1)");
  }
  if (qy.search_cap < 1) throw InvalidInput("search_cap must be >= 1");
}

double require_unit_open_closed(const std::optional<double>& v, const char* name) {
  const double x = require(v, name);
  if (!(x > 0.0 && x <= 1.0)) {
    throw InvalidInput(std::string(name) + " must lie in (0, 1]");
  }
  return x;
}

/// -log(1 - x) for x in [0, 1).
double neg_log1m(double x) { return -std::log1p(-x); }

/// inf{time(M) : sum_{i<M} term(i) >= threshold}, giving up once time(M)
/// exceeds the cap.
BoundResult search_upper(double threshold, std::uint64_t cap,
                         const std::function<double(std::uint64_t)>& term,
                         const std::function<std::uint64_t(std::uint64_t)>& time) {
  BoundResult r;
  r.audit.threshold = threshold;
  CompensatedSum acc;
  double previous = 0.0;
  for (std::uint64_t m = 0;; ++m) {
    const std::uint64_t t = time(m);
    if (t > cap) break;
    r.audit.terms = m;
    r.audit.sum = acc.value();
    r.audit.adjacent_sum = previous;
    if (acc.value() >= threshold) {
      r.value = t;
      return r;
    }
    previous = acc.value();
    acc.add(term(m));
  }
  return r;
}

double checked_eta(const BoundQuery& qy) {
  return require_unit_open_closed(qy.eta, "eta");
}

double checked_q(const BoundQuery& qy) { return require_unit_open_closed(qy.q, "q"); }

/// log((q eta)^{(n-1)^2} / 2)
double log_joint_constant(double q, double eta, int n) {
  const double d = static_cast<double>(n - 1);
  return d * d * std::log(q * eta) - std::log(2.0);
}

}  // namespace

BoundResult tcom_lower_bound(const BoundQuery& qy) {
  validate_common(qy);
  const double threshold = std::log(1.0 / qy.epsilon) / qy.n;
  BoundResult r;
  r.audit.threshold = threshold;
  CompensatedSum acc;
  for (std::uint64_t k = 0; k <= qy.search_cap; ++k) {
    const double before = acc.value();
    acc.add(neg_log1m(qy.schedule.value(k)));
    r.audit.terms = k;
    r.audit.sum = before;
    r.audit.adjacent_sum = acc.value();
    if (acc.value() > threshold) {
      r.value = k;
      return r;
    }
  }
  return r;
}

BoundResult tcom_upper_connectivity_independent(const BoundQuery& qy) {
  validate_common(qy);
  if (!qy.schedule.is_non_increasing()) {
    throw PreconditionError("connectivity-independent bound needs a non-increasing schedule");
  }
  const double q = checked_q(qy);
  const double eta = checked_eta(qy);
  const std::uint64_t period =
      static_cast<std::uint64_t>(qy.n - 1) * static_cast<std::uint64_t>(qy.n - 1);
  const double log_c = log_joint_constant(q, eta, qy.n);
  const double r = static_cast<double>(qy.n - 1);
  BoundResult res = search_upper(
      std::log(std::pow(qy.epsilon, -2.0)), qy.search_cap,
      [&](std::uint64_t i) {
        const double p = qy.schedule.value((i + 1) * period);
        if (p <= 0.0) return 0.0;
        return neg_log1m(std::exp(log_c + r * std::log(p)));
      },
      [&](std::uint64_t m) { return m * period; });
  res.audit.extra["log_coefficient"] = log_c;
  return res;
}

double window_min_product(const ProbabilitySchedule& s, std::uint64_t begin,
                          std::uint64_t end, int r, std::uint64_t max_window) {
  if (r < 1) throw InvalidInput("window product needs r >= 1");
  if (end < begin || end - begin < static_cast<std::uint64_t>(r)) {
    throw InvalidInput("window holds fewer indices than factors");
  }
  if (end - begin > max_window) {
    throw ResourceError("window of " + std::to_string(end - begin) +
                        " indices exceeds max_window " + std::to_string(max_window));
  }
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(end - begin));
  for (std::uint64_t k = begin; k < end; ++k) vals.push_back(s.value(k));
  // All values are nonnegative, so the r smallest give the smallest product.
  const auto mid = vals.begin() + r;
  std::nth_element(vals.begin(), mid - 1, vals.end());
  double prod = 1.0;
  for (auto it = vals.begin(); it != mid; ++it) prod *= *it;
  return prod;
}

double pbar(const ProbabilitySchedule& sched, int n, std::uint64_t block_length,
            std::uint64_t s, std::uint64_t max_window) {
  if (n < 2) throw InvalidInput("pbar needs n >= 2");
  if (block_length < 1) throw InvalidInput("block length B must be >= 1");
  const std::uint64_t w = static_cast<std::uint64_t>(n - 1) *
                          static_cast<std::uint64_t>(n - 1) * block_length;
  return window_min_product(sched, s * w, (s + 1) * w, n - 1, max_window);
}

BoundResult tcom_upper_uniform_joint(const BoundQuery& qy) {
  validate_common(qy);
  const double q = checked_q(qy);
  const double eta = checked_eta(qy);
  const std::uint64_t b = require(qy.block_length, "B");
  if (b < 1) throw InvalidInput("B must be >= 1");
  const std::uint64_t w = static_cast<std::uint64_t>(qy.n - 1) *
                          static_cast<std::uint64_t>(qy.n - 1) * b;
  const double log_c = log_joint_constant(q, eta, qy.n);
  // Windows are scanned once each; their total length is bounded by the cap.
  const std::uint64_t window_limit = std::max(qy.max_window, w);
  BoundResult res = search_upper(
      std::log(std::pow(qy.epsilon, -2.0)), qy.search_cap,
      [&](std::uint64_t i) {
        const double p = pbar(qy.schedule, qy.n, b, i, window_limit);
        if (p <= 0.0) return 0.0;
        return neg_log1m(std::exp(log_c + std::log(p)));
      },
      [&](std::uint64_t m) { return m * w; });
  res.audit.extra["log_coefficient"] = log_c;
  return res;
}

double phat(const ProbabilitySchedule& sched, int n, const IntervalEnds& ends,
            std::uint64_t s, std::uint64_t max_window) {
  if (n < 2) throw InvalidInput("phat needs n >= 2");
  const auto d = static_cast<std::uint64_t>(n - 1);
  return window_min_product(sched, ends.end(s * d), ends.end((s + 1) * d), n - 1,
                            max_window);
}

BoundResult tcom_upper_bidirectional(const BoundQuery& qy) {
  validate_common(qy);
  const double q = checked_q(qy);
  const double eta = checked_eta(qy);
  const IntervalEnds& ends = require(qy.interval_ends, "interval_ends");
  const auto d = static_cast<std::uint64_t>(qy.n - 1);
  const double log_c = static_cast<double>(qy.n - 1) * std::log(q * eta);
  BoundResult res = search_upper(
      std::log(std::pow(qy.epsilon, -2.0)), qy.search_cap,
      [&](std::uint64_t i) {
        const double p = phat(qy.schedule, qy.n, ends, i, qy.max_window);
        if (p <= 0.0) return 0.0;
        return neg_log1m(std::exp(log_c + std::log(p)));
      },
      [&](std::uint64_t s) { return ends.end(s * d); });
  res.audit.extra["log_coefficient"] = log_c;
  return res;
}

double ptilde(const ProbabilitySchedule& sched, const IntervalEnds& ends,
              std::uint64_t s, std::uint64_t max_window) {
  return window_min_product(sched, ends.end(s), ends.end(s + 1), 1, max_window);
}

BoundResult tcom_upper_arc_independent(const BoundQuery& qy) {
  validate_common(qy);
  const double eta = checked_eta(qy);
  const double theta0 = require_unit_open_closed(qy.theta0, "theta0");
  const std::uint64_t arcs = require(qy.basic_arc_count, "basic_arc_count");
  if (arcs < 1) throw InvalidInput("basic_arc_count must be >= 1");
  const int n = qy.n;
  const double e0 = static_cast<double>(n - 1) * static_cast<double>(arcs);
  // A = 1 - u with u = (eta theta0 / n)^{e0}; work with log A = log1p(-u).
  const double log_u = e0 * std::log(eta * theta0 / n);
  const double u = std::exp(log_u);
  const double log_a = std::log1p(-u);
  const double log_arg = log_a + 2.0 * std::log(qy.epsilon) - std::log(static_cast<double>(n));
  if (log_arg >= 0.0) {
    throw InvalidInput("A eps^2 / n must be below 1");
  }
  BoundResult res;
  if (log_a == 0.0) {
    // u underflowed: the threshold is infinite.
    res.audit.threshold = std::numeric_limits<double>::infinity();
  } else {
    const double rhs = e0 / log_a * log_arg;
    const double nd = static_cast<double>(n);
    res = search_upper(
        rhs, qy.search_cap,
        [&](std::uint64_t i) {
          return -std::expm1(nd * std::log1p(-qy.schedule.value(i)));
        },
        [](std::uint64_t k) { return k; });
  }
  res.audit.extra["A"] = std::exp(log_a);
  res.audit.extra["log_A"] = log_a;
  res.audit.extra["exponent"] = e0;
  return res;
}

bool check_sufficiency(SufficiencyCondition condition, const SufficiencyInputs& in) {
  if (in.n < 2) throw InvalidInput("sufficiency conditions need n >= 2");
  const auto& s = in.schedule;
  auto growth = [&] {
    return require(in.interval_ends, "interval_ends").growth_exponent();
  };
  switch (condition) {
    case SufficiencyCondition::power_sum_uniform:
      return s.is_non_increasing() && sum_of_powers_diverges(s, in.n - 1);
    case SufficiencyCondition::bidirectional_subsequence:
      return s.is_non_increasing() &&
             subsequence_powers_diverge(s, in.n - 1, growth());
    case SufficiencyCondition::acyclic_infinite:
      return s.is_non_increasing() && subsequence_powers_diverge(s, 1, growth());
    case SufficiencyCondition::acyclic_uniform:
      return (in.block_length == 1 || s.is_non_increasing()) &&
             sum_of_powers_diverges(s, 1);
    case SufficiencyCondition::arc_independent:
      return sum_of_powers_diverges(s, 1);
  }
  throw InvalidInput("unsupported sufficiency condition");
}

std::string to_string(SufficiencyCondition c) {
  switch (c) {
    case SufficiencyCondition::power_sum_uniform: return "thm5_sufficient";
    case SufficiencyCondition::bidirectional_subsequence: return "cor2_sufficient";
    case SufficiencyCondition::acyclic_infinite: return "cor3i_sufficient";
    case SufficiencyCondition::acyclic_uniform: return "cor3ii_sufficient";
    case SufficiencyCondition::arc_independent: return "thm4_sufficient";
  }
  return "unknown";
}

}  // namespace consensus_lab
