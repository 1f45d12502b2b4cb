#include "consensus_lab/property_suites.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "consensus_lab/consensus.hpp"
#include "consensus_lab/errors.hpp"
#include "consensus_lab/graph_process.hpp"

namespace consensus_lab {
namespace {

constexpr std::size_t kKeptFailures = 10;
constexpr double kContractionSlack = 1e-9;
constexpr double kStateTolerance = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Warshall closure; reach[i][j] when a nonempty path i -> j exists.
std::vector<std::vector<bool>> closure(const Digraph& g) {
  const int n = g.size();
  std::vector<std::vector<bool>> r(static_cast<std::size_t>(n),
                                   std::vector<bool>(static_cast<std::size_t>(n)));
  for (const Arc& a : g.arcs()) {
    r[static_cast<std::size_t>(a.from)][static_cast<std::size_t>(a.to)] = true;
  }
  for (std::size_t k = 0; k < r.size(); ++k) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!r[i][k]) continue;
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[k][j]) r[i][j] = true;
      }
    }
  }
  return r;
}

double max_abs(const std::vector<double>& x) {
  double m = 1.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

std::string SuiteReport::reproducer() const {
  if (failures.empty()) return {};
  const PropertyFailure& f = failures.front();
  std::ostringstream os;
  os << "suite=" << suite << " property=" << f.property << " seed=" << seed
     << " case=" << f.case_index << " (rerun: verify --suite " << suite
     << " --seed " << seed << " --cases " << (f.case_index + 1) << ")";
  return os.str();
}

std::optional<std::string> check_product_contraction(CaseSampler& s) {
  const int n = s.between(2, 6);
  const int k = s.between(1, 5);
  const double density = s.uniform(0.2, 1.0);
  std::vector<StochasticMatrix> ms;
  double bound = 1.0;
  for (int i = 0; i < k; ++i) {
    ms.push_back(random_stochastic(n, density, s));
    bound *= lambda_coeff(ms.back());
  }
  const double d = delta(product(ms));
  if (d > bound + kContractionSlack) {
    std::ostringstream os;
    os << "delta of product " << d << " exceeds product of lambdas " << bound
       << " (n=" << n << ", k=" << k << ")";
    return os.str();
  }
  return std::nullopt;
}

std::optional<std::string> check_induced_union(CaseSampler& s) {
  const int n = s.between(2, 6);
  const int k = s.between(1, 5);
  const double density = s.uniform(0.1, 0.7);
  std::vector<StochasticMatrix> ms;
  Digraph joint(n);
  for (int i = 0; i < k; ++i) {
    ms.push_back(random_positive_diagonal(n, density, s));
    joint.merge(induced_graph(ms.back()).graph);
  }
  const InducedGraph prod = induced_graph(product(ms));
  if (!joint.is_subgraph_of(prod.graph)) {
    return std::string("induced graph of the product misses an arc of some factor");
  }
  if (std::find(prod.positive_diagonal.begin(), prod.positive_diagonal.end(), false) !=
      prod.positive_diagonal.end()) {
    return std::string("product of positive-diagonal matrices lost a diagonal entry");
  }
  return std::nullopt;
}

std::optional<std::string> check_rooted_scrambling(CaseSampler& s) {
  const int n = s.between(3, 5);
  const double extra = s.uniform(0.0, 0.3);
  std::vector<StochasticMatrix> ms;
  for (int i = 0; i < n - 1; ++i) {
    const Digraph g = random_rooted_digraph(n, extra, s);
    if (!is_quasi_strongly_connected(g)) return std::string("generator produced an unrooted graph");
    ms.push_back(equal_weight_matrix(g));
  }
  const double lam = lambda_coeff(product(ms));
  if (!(lam < 1.0)) {
    std::ostringstream os;
    os << "product of " << n - 1 << " rooted matrices has lambda " << lam;
    return os.str();
  }
  return std::nullopt;
}

std::optional<std::string> check_level_function(CaseSampler& s) {
  const int n = s.between(1, 8);
  const Digraph g = random_acyclic_rooted(n, s.uniform(0.0, 0.6), s);
  const LevelFunction lf = longest_path_levels(g);
  const std::vector<int> r = roots(g);
  if (r.size() != 1 || r.front() != lf.root) return std::string("acyclic rooted graph must have one root");
  std::vector<bool> seen(static_cast<std::size_t>(lf.d_star + 1), false);
  for (int v = 0; v < n; ++v) {
    const int level = lf.levels[static_cast<std::size_t>(v)];
    if (level < 0 || level > lf.d_star) return std::string("level outside [0, d_star]");
    seen[static_cast<std::size_t>(level)] = true;
  }
  for (int l = 0; l <= lf.d_star; ++l) {
    if (!seen[static_cast<std::size_t>(l)]) {
      return "no node on level " + std::to_string(l) + " of " + std::to_string(lf.d_star);
    }
  }
  for (const Arc& a : g.arcs()) {
    if (lf.levels[static_cast<std::size_t>(a.to)] < lf.levels[static_cast<std::size_t>(a.from)] + 1) {
      return std::string("arc does not increase the longest-path level");
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_connectivity_routes(CaseSampler& s) {
  const int n = s.between(1, 9);
  const Digraph g = s.coin(0.5) ? random_digraph(n, s.uniform(0.0, 0.5), s)
                                : random_rooted_digraph(n, s.uniform(0.0, 0.2), s);
  const auto reach = closure(g);
  std::vector<int> expected_roots;
  bool cyclic = false;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    bool all = true;
    for (int j = 0; j < n; ++j) {
      if (j != i && !reach[ui][static_cast<std::size_t>(j)]) all = false;
    }
    if (all) expected_roots.push_back(i);
    cyclic = cyclic || reach[ui][ui];
  }
  if (roots(g) != expected_roots) return std::string("roots disagree with the transitive closure");
  if (is_quasi_strongly_connected(g) != !expected_roots.empty()) {
    return std::string("quasi-strong connectivity disagrees with the closure");
  }
  if (is_acyclic(g) == cyclic) return std::string("acyclicity disagrees with the closure");
  const std::vector<int> topo = topological_order(g);
  if (topo.empty() != cyclic) return std::string("topological order exists iff acyclic");
  if (!topo.empty()) {
    std::vector<int> pos(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pos[static_cast<std::size_t>(topo[static_cast<std::size_t>(t)])] = t;
    for (const Arc& a : g.arcs()) {
      if (pos[static_cast<std::size_t>(a.from)] >= pos[static_cast<std::size_t>(a.to)]) {
        return std::string("topological order violated by an arc");
      }
    }
  }
  if (reversed(reversed(g)) != g) return std::string("reversing twice changed the graph");
  return std::nullopt;
}

std::optional<std::string> check_engine_step(CaseSampler& s) {
  const int n = s.between(1, 8);
  const Digraph g = random_digraph(n, s.uniform(0.0, 0.8), s);
  const WeightRule rule = s.coin(0.5) ? WeightRule::equal_weights()
                                      : WeightRule::self_confident(s.uniform(0.51, 0.99));
  SuccessMask success = 0;
  for (int i = 0; i < n; ++i) {
    if (s.coin(0.6)) success |= SuccessMask{1} << i;
  }
  const std::vector<double> x = random_state(n, s);
  const double scale = max_abs(x);

  const StepResult ref = step(x, g, rule, success);
  std::vector<double> fast = x;
  std::vector<double> scratch(x.size());
  apply_update(fast, g, rule, success, scratch);

  const double eta = rule.eta(n);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (std::abs(fast[ui] - ref.state[ui]) > kStateTolerance * scale) {
      return std::string("direct update disagrees with W*x");
    }
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = ref.w(i, j);
      sum += w;
      if (w != 0.0 && w < eta * (1.0 - kStateTolerance)) return std::string("W entry below eta");
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) return std::string("W row not stochastic");
    if (!((success >> i) & 1U) && fast[ui] != x[ui]) {
      return std::string("node without success changed");
    }
  }
  if (success == 0 && ref.w != StochasticMatrix::identity(n)) {
    return std::string("no successes but W is not the identity");
  }
  const auto [lo0, hi0] = std::minmax_element(x.begin(), x.end());
  const auto [lo1, hi1] = std::minmax_element(fast.begin(), fast.end());
  if (*hi1 > *hi0 || *lo1 < *lo0) return std::string("state left the hull of the previous state");
  const double h0 = *hi0 - *lo0;
  const double h1 = *hi1 - *lo1;
  if (rule.kind() == WeightKind::self_confident &&
      h1 < (2.0 * rule.a_star() - 1.0) * h0 - kStateTolerance * scale) {
    return std::string("contraction below the (2a*-1) floor");
  }

  const double shift = s.uniform(-5.0, 5.0);
  const double factor = s.uniform(-3.0, 3.0);
  std::vector<double> shifted = x;
  std::vector<double> scaled = x;
  for (double& v : shifted) v += shift;
  for (double& v : scaled) v *= factor;
  apply_update(shifted, g, rule, success, scratch);
  apply_update(scaled, g, rule, success, scratch);
  const double tol = 1e-11 * (scale + std::abs(shift)) * std::max(1.0, std::abs(factor));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(shifted[i] - shift - fast[i]) > tol) return std::string("translation equivariance broken");
    if (std::abs(scaled[i] - factor * fast[i]) > tol) return std::string("scale equivariance broken");
  }
  return std::nullopt;
}

std::optional<std::string> check_engine_trial(CaseSampler& s) {
  const int n = s.between(2, 6);
  const Digraph basic = random_rooted_digraph(n, s.uniform(0.0, 0.5), s);
  const double theta = s.uniform(0.2, 1.0);
  const GraphProcess p = GraphProcess::arc_independent(basic, theta, theta);
  const ProbabilitySchedule sched = ProbabilitySchedule::constant(s.uniform(0.05, 0.95));
  const WeightRule rule = s.coin(0.5) ? WeightRule::equal_weights()
                                      : WeightRule::self_confident(s.uniform(0.51, 0.9));
  TrialOptions to;
  to.horizon = 300;
  to.stop_at_hit = false;
  to.check_invariants = true;
  const std::vector<double> x0 = random_state(n, s);
  const auto seed = static_cast<std::uint64_t>(s.between(0, 1 << 30));
  const TrialRecord rec = run_trial(p, sched, rule, x0, to, RngStream(seed, 0));
  if (rec.violations > 0) return rec.first_violation;
  if (!std::is_sorted(rec.h_seq.rbegin(), rec.h_seq.rend())) {
    return std::string("recorded H sequence increased");
  }
  std::uint64_t events = 0;
  for (auto v : rec.psi_seq) events += v;
  if (events != rec.update_events) return std::string("psi sequence disagrees with update count");
  return std::nullopt;
}

SuiteReport run_property(const std::string& name, const Property& property,
                         std::uint32_t cases, std::uint64_t seed) {
  SuiteReport r;
  r.suite = name;
  r.seed = seed;
  r.cases = cases;
  const std::uint64_t derived = splitmix64(seed ^ fnv1a(name));
  for (std::uint32_t c = 0; c < cases; ++c) {
    CaseSampler sampler(derived, c);
    ++r.checks;
    std::optional<std::string> failure;
    try {
      failure = property(sampler);
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure) {
      ++r.violations;
      if (r.failures.size() < kKeptFailures) r.failures.push_back({name, c, *failure});
    }
  }
  return r;
}

SuiteReport run_suite(const std::string& suite, std::uint32_t cases, std::uint64_t seed) {
  std::vector<std::pair<std::string, Property>> props;
  if (suite == "matrix") {
    props = {{"product_contraction", check_product_contraction},
             {"induced_union", check_induced_union},
             {"rooted_scrambling", check_rooted_scrambling}};
  } else if (suite == "graph") {
    props = {{"level_function", check_level_function},
             {"connectivity_routes", check_connectivity_routes}};
  } else if (suite == "engine") {
    props = {{"engine_step", check_engine_step}, {"engine_trial", check_engine_trial}};
  } else {
    throw InvalidInput("unknown suite '" + suite + "' (expected matrix, graph or engine)");
  }
  SuiteReport total;
  total.suite = suite;
  total.seed = seed;
  total.cases = cases;
  for (const auto& [name, prop] : props) {
    const SuiteReport r = run_property(name, prop, cases, seed);
    total.checks += r.checks;
    total.violations += r.violations;
    for (const auto& f : r.failures) {
      if (total.failures.size() < kKeptFailures) total.failures.push_back(f);
    }
  }
  return total;
}

}  // namespace consensus_lab
