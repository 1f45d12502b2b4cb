#include "consensus_lab/graph_process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "consensus_lab/errors.hpp"
#include "consensus_lab/statistics.hpp"

namespace consensus_lab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kFillerAttempts = 64;

/// Stable per-arc slot, independent of which basic graph the arc belongs to.
constexpr std::uint32_t arc_slot(int from, int to) {
  return static_cast<std::uint32_t>(from * Digraph::kMaxNodes + to);
}

std::uint64_t uniform_below64(std::uint64_t bound, std::uint64_t time,
                              std::uint32_t slot, StreamTag tag,
                              const RngStream& rng) {
  __extension__ using Wide = unsigned __int128;
  const Wide wide = static_cast<Wide>(rng.bits(time, slot, tag)) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

void require_unit_probability(double v, const char* what, bool allow_zero,
                              bool allow_one) {
  const bool ok = (allow_zero ? v >= 0.0 : v > 0.0) &&
                  (allow_one ? v <= 1.0 : v < 1.0);
  if (!ok) {
    throw InvalidInput(std::string(what) + " out of range: " + std::to_string(v));
  }
}

void validate_arc_probabilities(const Digraph& basic,
                                const std::vector<double>& theta, double floor) {
  require_unit_probability(floor, "theta_floor", false, true);
  if (theta.size() != basic.arc_count()) {
    throw InvalidInput("theta needs one probability per basic-graph arc");
  }
  for (double t : theta) {
    require_unit_probability(t, "theta", false, true);
    if (t < floor) {
      throw InvalidInput("theta " + std::to_string(t) + " below theta_floor " +
                         std::to_string(floor));
    }
  }
}

Digraph sample_basic_arcs(const Digraph& basic, const std::vector<double>& theta,
                          std::uint64_t k, const RngStream& rng) {
  Digraph g(basic.size());
  const std::vector<Arc> arcs = basic.arcs();
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (rng.bernoulli(theta[a], k, arc_slot(arcs[a].from, arcs[a].to),
                      StreamTag::arc)) {
      g.add_arc(arcs[a]);
    }
  }
  return g;
}

/// Arcs of the block's arborescence that land on step `offset` of a block
/// of `length` steps.
Digraph spread_block_arcs(int n, double q, std::uint64_t block,
                          std::uint64_t length, std::uint64_t offset,
                          const RngStream& rng) {
  Digraph g(n);
  if (!rng.bernoulli(q, block, 0, StreamTag::block_coin)) return g;
  const Digraph tree = random_arborescence(n, block, rng);
  for (const Arc& a : tree.arcs()) {
    // Each tree arc is identified by its head: every non-root has one parent.
    const std::uint64_t lands =
        uniform_below64(length, block, static_cast<std::uint32_t>(a.to),
                        StreamTag::arc_slot, rng);
    if (lands == offset) g.add_arc(a);
  }
  return g;
}

Digraph sample_connectivity_independent(const ConnectivityIndependentProcess& p,
                                        std::uint64_t k, const RngStream& rng) {
  if (rng.bernoulli(p.q, k, 0, StreamTag::rooted_coin)) {
    Digraph g = random_arborescence(p.n, k, rng);
    if (p.rooted.extra_arc_prob > 0.0) {
      for (int i = 0; i < p.n; ++i) {
        for (int j = 0; j < p.n; ++j) {
          if (i != j && rng.bernoulli(p.rooted.extra_arc_prob, k, arc_slot(i, j),
                                      StreamTag::extra_arc)) {
            g.add_arc(i, j);
          }
        }
      }
    }
    return g;
  }
  for (int attempt = 0; attempt < kFillerAttempts; ++attempt) {
    Digraph g(p.n);
    if (p.filler.arc_prob > 0.0) {
      const auto base = static_cast<std::uint32_t>(attempt) *
                        static_cast<std::uint32_t>(Digraph::kMaxNodes *
                                                   Digraph::kMaxNodes);
      for (int i = 0; i < p.n; ++i) {
        for (int j = 0; j < p.n; ++j) {
          if (i != j && rng.bernoulli(p.filler.arc_prob, k, base + arc_slot(i, j),
                                      StreamTag::filler_arc)) {
            g.add_arc(i, j);
          }
        }
      }
    }
    if (!p.filler.exclude_connected || !is_quasi_strongly_connected(g)) return g;
  }
  return Digraph(p.n);
}

Digraph symmetrized(Digraph g) {
  for (const Arc& a : g.arcs()) g.add_arc(a.to, a.from);
  return g;
}

}  // namespace

std::string to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::arc_independent: return "arc_independent";
    case ProcessKind::connectivity_independent: return "connectivity_independent";
    case ProcessKind::uniformly_joint: return "uniformly_joint";
    case ProcessKind::infinitely_joint: return "infinitely_joint";
    case ProcessKind::bidirectional: return "bidirectional";
    case ProcessKind::acyclic_restricted: return "acyclic_restricted";
  }
  return "unknown";
}

Digraph random_arborescence(int n, std::uint64_t time, const RngStream& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = rng.below(static_cast<std::uint32_t>(i + 1), time,
                             static_cast<std::uint32_t>(i), StreamTag::parent_order);
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  Digraph tree(n);
  for (int t = 1; t < n; ++t) {
    const auto parent = rng.below(static_cast<std::uint32_t>(t), time,
                                  static_cast<std::uint32_t>(t), StreamTag::parent_pick);
    tree.add_arc(order[parent], order[static_cast<std::size_t>(t)]);
  }
  return tree;
}

GraphProcess::GraphProcess(Params params) : params_(std::move(params)) {
  auto check_n = [](int n) {
    if (n < 1 || n > Digraph::kMaxNodes) {
      throw InvalidInput("process node count must be in [1, 64]");
    }
  };
  std::visit(
      Overloaded{
          [](const ArcIndependentProcess& p) {
            validate_arc_probabilities(p.basic_graph, p.theta, p.theta_floor);
          },
          [&](const ConnectivityIndependentProcess& p) {
            check_n(p.n);
            require_unit_probability(p.q, "q", false, true);
            require_unit_probability(p.rooted.extra_arc_prob, "extra_arc_prob",
                                     true, true);
            require_unit_probability(p.filler.arc_prob, "arc_prob", true, true);
          },
          [&](const UniformlyJointProcess& p) {
            check_n(p.n);
            require_unit_probability(p.q, "q", false, true);
            if (p.block_length < 1) throw InvalidInput("block length B must be >= 1");
          },
          [&](const InfinitelyJointProcess& p) {
            check_n(p.n);
            require_unit_probability(p.q, "q", false, true);
          },
          [](const BidirectionalProcess& p) {
            if (!p.inner) throw InvalidInput("bidirectional process needs an inner process");
          },
          [](const AcyclicRestrictedProcess& p) {
            validate_arc_probabilities(p.basic_graph, p.theta, p.theta_floor);
            if (!is_acyclic(p.basic_graph)) {
              throw InvalidInput("acyclic_restricted basic graph has a cycle");
            }
            if (!is_quasi_strongly_connected(p.basic_graph)) {
              throw InvalidInput(
                  "acyclic_restricted basic graph is not quasi-strongly connected");
            }
          },
      },
      params_);
}

GraphProcess GraphProcess::arc_independent(Digraph basic, double theta,
                                           double theta_floor) {
  std::vector<double> per_arc(basic.arc_count(), theta);
  return arc_independent(std::move(basic), std::move(per_arc), theta_floor);
}

GraphProcess GraphProcess::arc_independent(Digraph basic, std::vector<double> theta,
                                           double theta_floor) {
  return GraphProcess(
      ArcIndependentProcess{std::move(basic), std::move(theta), theta_floor});
}

GraphProcess GraphProcess::bidirectional(GraphProcess inner) {
  return GraphProcess(
      BidirectionalProcess{std::make_shared<const GraphProcess>(std::move(inner))});
}

int GraphProcess::node_count() const {
  return std::visit(
      Overloaded{
          [](const ArcIndependentProcess& p) { return p.basic_graph.size(); },
          [](const AcyclicRestrictedProcess& p) { return p.basic_graph.size(); },
          [](const BidirectionalProcess& p) { return p.inner->node_count(); },
          [](const auto& p) { return p.n; },
      },
      params_);
}

Digraph GraphProcess::sample(std::uint64_t k, const RngStream& rng) const {
  return std::visit(
      Overloaded{
          [&](const ArcIndependentProcess& p) {
            return sample_basic_arcs(p.basic_graph, p.theta, k, rng);
          },
          [&](const AcyclicRestrictedProcess& p) {
            return sample_basic_arcs(p.basic_graph, p.theta, k, rng);
          },
          [&](const ConnectivityIndependentProcess& p) {
            return sample_connectivity_independent(p, k, rng);
          },
          [&](const UniformlyJointProcess& p) {
            return spread_block_arcs(p.n, p.q, k / p.block_length, p.block_length,
                                     k % p.block_length, rng);
          },
          [&](const InfinitelyJointProcess& p) {
            const std::uint64_t m = p.interval_ends.interval_of(k);
            const std::uint64_t start = p.interval_ends.end(m);
            return spread_block_arcs(p.n, p.q, m, p.interval_ends.length(m),
                                     k - start, rng);
          },
          [&](const BidirectionalProcess& p) {
            return symmetrized(p.inner->sample(k, rng));
          },
      },
      params_);
}

bool GraphProcess::is_interval_based() const {
  switch (kind()) {
    case ProcessKind::uniformly_joint:
    case ProcessKind::infinitely_joint:
      return true;
    case ProcessKind::bidirectional:
      return std::get<BidirectionalProcess>(params_).inner->is_interval_based();
    default:
      return false;
  }
}

std::pair<std::uint64_t, std::uint64_t> GraphProcess::unit_bounds(
    std::uint64_t unit) const {
  if (const auto* b = std::get_if<BidirectionalProcess>(&params_)) {
    return b->inner->unit_bounds(unit);
  }
  if (const auto* u = std::get_if<UniformlyJointProcess>(&params_)) {
    return {unit * u->block_length, (unit + 1) * u->block_length};
  }
  if (const auto* p = std::get_if<InfinitelyJointProcess>(&params_)) {
    return {p->interval_ends.end(unit), p->interval_ends.end(unit + 1)};
  }
  return {unit, unit + 1};
}

GraphProcess GraphProcess::with_q(double q) const {
  return std::visit(
      Overloaded{
          [&](ConnectivityIndependentProcess p) {
            p.q = q;
            return GraphProcess(std::move(p));
          },
          [&](UniformlyJointProcess p) {
            p.q = q;
            return GraphProcess(std::move(p));
          },
          [&](InfinitelyJointProcess p) {
            p.q = q;
            return GraphProcess(std::move(p));
          },
          [&](const BidirectionalProcess& p) {
            return GraphProcess::bidirectional(p.inner->with_q(q));
          },
          [](const auto&) -> GraphProcess {
            throw InvalidInput("process kind has no q parameter");
          },
      },
      params_);
}

GraphProcess GraphProcess::with_uniform_theta(double theta) const {
  return std::visit(
      Overloaded{
          [&](ArcIndependentProcess p) {
            std::fill(p.theta.begin(), p.theta.end(), theta);
            p.theta_floor = theta;
            return GraphProcess(std::move(p));
          },
          [&](AcyclicRestrictedProcess p) {
            std::fill(p.theta.begin(), p.theta.end(), theta);
            p.theta_floor = theta;
            return GraphProcess(std::move(p));
          },
          [&](const BidirectionalProcess& p) {
            return GraphProcess::bidirectional(p.inner->with_uniform_theta(theta));
          },
          [](const auto&) -> GraphProcess {
            throw InvalidInput("process kind has no arc probabilities");
          },
      },
      params_);
}

double lag1_correlation(const std::vector<std::uint8_t>& x) {
  if (x.size() < 3) return 0.0;
  const std::size_t pairs = x.size() - 1;
  double sa = 0, sb = 0, sab = 0;
  for (std::size_t t = 0; t < pairs; ++t) {
    sa += x[t];
    sb += x[t + 1];
    sab += static_cast<double>(x[t] * x[t + 1]);
  }
  const double n = static_cast<double>(pairs);
  const double ma = sa / n;
  const double mb = sb / n;
  // Indicators: sum of squares equals sum.
  const double va = sa / n - ma * ma;
  const double vb = sb / n - mb * mb;
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  return (sab / n - ma * mb) / std::sqrt(va * vb);
}

ClassDiagnostics verify_class(const GraphProcess& p, std::uint64_t draws,
                              const RngStream& rng) {
  if (draws < 1000) throw InvalidInput("verify_class needs at least 1000 draws");
  const int n = p.node_count();

  const Digraph* basic = nullptr;
  const std::vector<double>* theta = nullptr;
  if (const auto* a = std::get_if<ArcIndependentProcess>(&p.params())) {
    basic = &a->basic_graph;
    theta = &a->theta;
  } else if (const auto* c = std::get_if<AcyclicRestrictedProcess>(&p.params())) {
    basic = &c->basic_graph;
    theta = &c->theta;
  }
  const std::vector<Arc> basic_arcs = basic ? basic->arcs() : std::vector<Arc>{};

  ClassDiagnostics report;
  report.draws = draws;
  report.unit = p.is_interval_based() ? "interval" : "step";

  std::vector<std::uint8_t> qsc(static_cast<std::size_t>(draws));
  std::vector<std::vector<std::uint8_t>> arc_seq(basic_arcs.size(),
                                                 std::vector<std::uint8_t>());
  for (auto& s : arc_seq) s.reserve(static_cast<std::size_t>(draws));
  Digraph everything(n);
  std::uint64_t rooted = 0;

  for (std::uint64_t u = 0; u < draws; ++u) {
    const auto [start, end] = p.unit_bounds(u);
    Digraph joint(n);
    for (std::uint64_t k = start; k < end; ++k) {
      const Digraph g = p.sample(k, rng);
      if (report.bidirectional_always && !is_bidirectional(g)) {
        report.bidirectional_always = false;
      }
      joint.merge(g);
      for (std::size_t a = 0; a < basic_arcs.size(); ++a) {
        arc_seq[a].push_back(g.has_arc(basic_arcs[a].from, basic_arcs[a].to));
      }
    }
    everything.merge(joint);
    const bool ok = is_quasi_strongly_connected(joint);
    qsc[static_cast<std::size_t>(u)] = ok;
    rooted += ok;
  }

  report.qsc_frequency = static_cast<double>(rooted) / static_cast<double>(draws);
  const Interval ci = wilson_interval(rooted, draws);
  report.qsc_ci_low = ci.low;
  report.qsc_ci_high = ci.high;
  report.qsc_lag1_correlation = lag1_correlation(qsc);
  report.joint_acyclic = is_acyclic(everything);

  for (std::size_t a = 0; a < basic_arcs.size(); ++a) {
    const auto& seq = arc_seq[a];
    const double hits = static_cast<double>(std::accumulate(seq.begin(), seq.end(), 0));
    const double freq = hits / static_cast<double>(seq.size());
    report.arc_frequencies.push_back({basic_arcs[a], (*theta)[a], freq});
    report.max_arc_deviation =
        std::max(report.max_arc_deviation, std::abs(freq - (*theta)[a]));
    report.max_abs_arc_lag1_correlation = std::max(
        report.max_abs_arc_lag1_correlation, std::abs(lag1_correlation(seq)));
  }
  return report;
}

}  // namespace consensus_lab
