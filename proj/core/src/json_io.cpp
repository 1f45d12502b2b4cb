#include "consensus_lab/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace consensus_lab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

/// Rethrows library validation errors against the given key.
template <class Fn>
auto at_key(const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(key, e.what());
  }
}

Json optional_time(const std::optional<std::uint64_t>& t) {
  return t ? Json(*t) : Json(nullptr);
}

std::vector<double> theta_values(JsonObject& o, const std::string& key,
                                 std::size_t arcs) {
  const Json& t = o.raw(key);
  if (t.is_number()) return std::vector<double>(arcs, t.get<double>());
  if (t.is_array()) {
    std::vector<double> v;
    for (const auto& x : t) {
      if (!x.is_number()) throw ConfigError(o.path(key), "expected numbers");
      v.push_back(x.get<double>());
    }
    if (v.size() != arcs) {
      throw ConfigError(o.path(key), "needs one probability per basic-graph arc (" +
                                         std::to_string(arcs) + ")");
    }
    return v;
  }
  throw ConfigError(o.path(key), "expected a number or an array");
}

}  // namespace

JsonObject::JsonObject(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) {
    throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }
}

std::string JsonObject::path(std::string_view key) const { return join(path_, key); }

bool JsonObject::has(std::string_view key) const {
  return j_.contains(std::string(key));
}

const Json& JsonObject::at(std::string_view key) {
  const std::string k(key);
  if (!j_.contains(k)) throw ConfigError(path(key), "missing");
  if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) seen_.push_back(k);
  return j_.at(k);
}

const Json& JsonObject::raw(std::string_view key) { return at(key); }

double JsonObject::number(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError(path(key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path(key), "expected a finite number");
  return d;
}

std::optional<double> JsonObject::optional_number(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::uint64_t JsonObject::count(std::string_view key) {
  const Json& v = at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i >= 0) return static_cast<std::uint64_t>(i);
    throw ConfigError(path(key), "expected a non-negative integer");
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError(path(key), "expected a non-negative integer");
}

std::optional<std::uint64_t> JsonObject::optional_count(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return count(key);
}

std::string JsonObject::string(std::string_view key) {
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError(path(key), "expected a string");
  return v.get<std::string>();
}

bool JsonObject::boolean(std::string_view key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
  return v.get<bool>();
}

JsonObject JsonObject::object(std::string_view key) {
  return JsonObject(at(key), path(key));
}

void JsonObject::finish(std::initializer_list<std::string_view> also_allowed) const {
  for (const auto& [k, v] : j_.items()) {
    const bool known =
        std::find(seen_.begin(), seen_.end(), k) != seen_.end() ||
        std::find(also_allowed.begin(), also_allowed.end(), k) != also_allowed.end();
    if (!known) throw ConfigError(join(path_, k), "unknown key");
  }
}

Json to_json(const Digraph& g) {
  Json arcs = Json::array();
  for (const Arc& a : g.arcs()) arcs.push_back({a.from + 1, a.to + 1});
  return {{"n", g.size()}, {"arcs", arcs}};
}

Digraph digraph_from_json(const Json& j, const std::string& path, int n_hint) {
  if (j.is_string()) {
    if (j.get<std::string>() != "complete") {
      throw ConfigError(path, "expected \"complete\" or {\"n\", \"arcs\"}");
    }
    if (n_hint < 1) throw ConfigError(path, "\"complete\" needs n");
    return at_key(path, [&] { return Digraph::complete(n_hint); });
  }
  JsonObject o(j, path);
  const auto n = static_cast<int>(o.count("n"));
  if (n_hint > 0 && n != n_hint) {
    throw ConfigError(o.path("n"), "graph has " + std::to_string(n) +
                                       " nodes, config n is " + std::to_string(n_hint));
  }
  const Json& arcs = o.raw("arcs");
  if (!arcs.is_array()) throw ConfigError(o.path("arcs"), "expected an array");
  o.finish();
  return at_key(o.path("arcs"), [&] {
    Digraph g(n);
    for (const auto& a : arcs) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer() ||
          !a[1].is_number_integer()) {
        throw ConfigError(o.path("arcs"), "arcs are [from, to] pairs of 1-based nodes");
      }
      g.add_arc(a[0].get<int>() - 1, a[1].get<int>() - 1);
    }
    return g;
  });
}

Json to_json(const StochasticMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.size(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"n", m.size()}, {"rows", rows}};
}

Json to_json(const ProbabilitySchedule& s) {
  return std::visit(
      Overloaded{
          [](const ConstantSchedule& c) -> Json {
            return {{"kind", "constant"}, {"p", c.p}};
          },
          [](const PowerDecaySchedule& p) -> Json {
            return {{"kind", "power_decay"}, {"c", p.c}, {"beta", p.beta}, {"cap", p.cap}};
          },
          [](const GeometricSchedule& g) -> Json {
            return {{"kind", "geometric"}, {"c", g.c}, {"rho", g.rho}, {"cap", g.cap}};
          },
          [](const ExplicitSchedule& e) -> Json {
            return {{"kind", "explicit_list"}, {"values", e.values}, {"tail", e.tail}};
          },
      },
      s.params());
}

ProbabilitySchedule schedule_from_json(const Json& j, const std::string& path) {
  JsonObject o(j, path);
  const std::string kind = o.string("kind");
  ProbabilitySchedule::Params params;
  if (kind == "constant") {
    params = ConstantSchedule{o.number("p")};
  } else if (kind == "power_decay") {
    PowerDecaySchedule p;
    p.c = o.number("c");
    p.beta = o.number("beta");
    p.cap = o.optional_number("cap").value_or(kDefaultProbabilityCap);
    params = p;
  } else if (kind == "geometric") {
    GeometricSchedule g;
    g.c = o.number("c");
    g.rho = o.number("rho");
    g.cap = o.optional_number("cap").value_or(kDefaultProbabilityCap);
    params = g;
  } else if (kind == "explicit_list") {
    ExplicitSchedule e;
    const Json& vals = o.raw("values");
    if (!vals.is_array()) throw ConfigError(o.path("values"), "expected an array");
    for (const auto& v : vals) {
      if (!v.is_number()) throw ConfigError(o.path("values"), "expected numbers");
      e.values.push_back(v.get<double>());
    }
    e.tail = o.optional_number("tail").value_or(0.0);
    params = e;
  } else {
    throw ConfigError(o.path("kind"), "unknown schedule kind '" + kind +
                                          "' (constant, power_decay, geometric, explicit_list)");
  }
  o.finish();
  return at_key(path, [&] { return ProbabilitySchedule(params); });
}

Json to_json(const IntervalEnds& e) {
  return std::visit(
      Overloaded{
          [](const ExplicitEnds& x) -> Json {
            return {{"kind", "explicit"}, {"values", x.values}};
          },
          [](const PowerEnds& p) -> Json {
            return {{"kind", "power"}, {"scale", p.scale}, {"exponent", p.exponent}};
          },
      },
      e.params());
}

IntervalEnds interval_ends_from_json(const Json& j, const std::string& path) {
  JsonObject o(j, path);
  const std::string kind = o.string("kind");
  IntervalEnds::Params params;
  if (kind == "power") {
    params = PowerEnds{o.number("scale"), o.number("exponent")};
  } else if (kind == "explicit") {
    ExplicitEnds e;
    const Json& vals = o.raw("values");
    if (!vals.is_array()) throw ConfigError(o.path("values"), "expected an array");
    for (const auto& v : vals) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(o.path("values"), "expected non-negative integers");
      }
      e.values.push_back(v.get<std::uint64_t>());
    }
    params = e;
  } else {
    throw ConfigError(o.path("kind"), "unknown interval_ends kind '" + kind +
                                          "' (power, explicit)");
  }
  o.finish();
  return at_key(path, [&] { return IntervalEnds(params); });
}

Json to_json(const GraphProcess& p) {
  Json j = std::visit(
      Overloaded{
          [](const ArcIndependentProcess& a) -> Json {
            return {{"basic_graph", to_json(a.basic_graph)},
                    {"theta", a.theta},
                    {"theta_floor", a.theta_floor}};
          },
          [](const AcyclicRestrictedProcess& a) -> Json {
            return {{"basic_graph", to_json(a.basic_graph)},
                    {"theta", a.theta},
                    {"theta_floor", a.theta_floor}};
          },
          [](const ConnectivityIndependentProcess& c) -> Json {
            return {{"n", c.n},
                    {"q", c.q},
                    {"extra_arc_prob", c.rooted.extra_arc_prob},
                    {"filler_arc_prob", c.filler.arc_prob},
                    {"exclude_connected", c.filler.exclude_connected}};
          },
          [](const UniformlyJointProcess& u) -> Json {
            return {{"n", u.n}, {"q", u.q}, {"B", u.block_length}};
          },
          [](const InfinitelyJointProcess& i) -> Json {
            return {{"n", i.n}, {"q", i.q}, {"interval_ends", to_json(i.interval_ends)}};
          },
          [](const BidirectionalProcess& b) -> Json {
            return {{"inner", to_json(*b.inner)}};
          },
      },
      p.params());
  j["kind"] = to_string(p.kind());
  return j;
}

GraphProcess process_from_json(const Json& j, const std::string& path, int n) {
  JsonObject o(j, path);
  const std::string kind = o.string("kind");
  auto arc_based = [&](auto tag) {
    auto p = std::move(tag);
    p.basic_graph = o.has("basic_graph")
                        ? digraph_from_json(o.raw("basic_graph"), o.path("basic_graph"), n)
                        : at_key(path, [&] { return Digraph::complete(n); });
    p.theta = theta_values(o, "theta", p.basic_graph.arc_count());
    const double lowest =
        p.theta.empty() ? 1.0 : *std::min_element(p.theta.begin(), p.theta.end());
    p.theta_floor = o.optional_number("theta_floor").value_or(lowest);
    return p;
  };
  std::optional<GraphProcess::Params> params;
  if (kind == "arc_independent") {
    params = arc_based(ArcIndependentProcess{Digraph(1), {}, 0.0});
  } else if (kind == "acyclic_restricted") {
    params = arc_based(AcyclicRestrictedProcess{Digraph(1), {}, 0.0});
  } else if (kind == "connectivity_independent") {
    ConnectivityIndependentProcess c;
    c.n = n;
    c.q = o.number("q");
    c.rooted.extra_arc_prob = o.optional_number("extra_arc_prob").value_or(0.0);
    c.filler.arc_prob = o.optional_number("filler_arc_prob").value_or(0.0);
    c.filler.exclude_connected = o.boolean("exclude_connected", true);
    params = c;
  } else if (kind == "uniformly_joint") {
    UniformlyJointProcess u;
    u.n = n;
    u.q = o.number("q");
    u.block_length = o.count("B");
    params = u;
  } else if (kind == "infinitely_joint") {
    InfinitelyJointProcess i;
    i.n = n;
    i.q = o.number("q");
    i.interval_ends = interval_ends_from_json(o.raw("interval_ends"), o.path("interval_ends"));
    params = i;
  } else if (kind == "bidirectional") {
    GraphProcess inner = process_from_json(o.raw("inner"), o.path("inner"), n);
    o.finish();
    return GraphProcess::bidirectional(std::move(inner));
  } else {
    throw ConfigError(o.path("kind"),
                      "unknown process kind '" + kind +
                          "' (arc_independent, connectivity_independent, uniformly_joint, "
                          "infinitely_joint, bidirectional, acyclic_restricted)");
  }
  // Serialized processes carry n; accept it when it matches.
  if (o.has("n") && static_cast<int>(o.count("n")) != n) {
    throw ConfigError(o.path("n"), "does not match the top-level n");
  }
  o.finish();
  return at_key(path, [&] { return GraphProcess(std::move(*params)); });
}

Json to_json(const WeightRule& r) {
  Json j = {{"kind", to_string(r.kind())}};
  if (r.kind() == WeightKind::self_confident) j["a_star"] = r.a_star();
  return j;
}

WeightRule rule_from_json(const Json& j, const std::string& path) {
  JsonObject o(j, path);
  const std::string kind = o.string("kind");
  if (kind == "equal_weights") {
    o.finish();
    return WeightRule::equal_weights();
  }
  if (kind == "self_confident") {
    const double a = o.number("a_star");
    o.finish();
    return at_key(o.path("a_star"), [&] { return WeightRule::self_confident(a); });
  }
  throw ConfigError(o.path("kind"),
                    "unknown rule kind '" + kind + "' (equal_weights, self_confident)");
}

Json to_json(const TrialRecord& r) {
  return {{"h0", r.h0},
          {"hit_time", optional_time(r.hit_time)},
          {"epsilon_time", optional_time(r.epsilon_time)},
          {"steps_run", r.steps_run},
          {"update_events", r.update_events},
          {"violations", r.violations},
          {"first_violation", r.first_violation},
          {"final_state", r.final_state},
          {"recorded_steps", r.recorded_steps},
          {"h_seq", r.h_seq},
          {"psi_seq", r.psi_seq}};
}

std::string trial_csv(const TrialRecord& r) {
  std::ostringstream os;
  os << "k,H,psi\n";
  char buf[32];
  for (std::size_t i = 0; i < r.recorded_steps.size(); ++i) {
    const std::uint64_t k = r.recorded_steps[i];
    std::snprintf(buf, sizeof buf, "%.17g", r.h_seq[i]);
    os << k << ',' << buf << ',';
    if (k < r.psi_seq.size()) os << static_cast<int>(r.psi_seq[static_cast<std::size_t>(k)]);
    os << '\n';
  }
  return os.str();
}

Json to_json(const BoundResult& r) {
  Json audit = {{"terms", r.audit.terms},
                {"sum", r.audit.sum},
                {"adjacent_sum", r.audit.adjacent_sum},
                {"threshold", std::isfinite(r.audit.threshold) ? Json(r.audit.threshold)
                                                               : Json("infinite")}};
  for (const auto& [k, v] : r.audit.extra) audit[k] = v;
  return {{"bound", r.value ? Json(*r.value) : Json("unbounded")}, {"audit", audit}};
}

Json to_json(const ConsensusEstimate& e) {
  return {{"p_hat", e.p_hat},
          {"ci_low", e.ci_low},
          {"ci_high", e.ci_high},
          {"successes", e.successes},
          {"trials", e.trials}};
}

Json to_json(const ConsensusReport& r) {
  Json per = Json::array();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    Json e = to_json(r.per_condition[i]);
    e["initial_condition"] = r.names[i];
    per.push_back(e);
  }
  return {{"pooled", to_json(r.pooled)}, {"per_initial_condition", per}};
}

Json to_json(const TcomEstimate& t) {
  Json per = Json::array();
  for (std::size_t i = 0; i < t.names.size(); ++i) {
    per.push_back({{"initial_condition", t.names[i]},
                   {"t_hat", optional_time(t.per_condition[i])},
                   {"censored", !t.per_condition[i].has_value()}});
  }
  return {{"epsilon", t.epsilon},
          {"t_hat", optional_time(t.t_hat)},
          {"censored", !t.t_hat.has_value()},
          {"per_initial_condition", per}};
}

Json to_json(const SweepRow& r) {
  Json j = {{"param_value", r.value},
            {"p_hat", r.estimate.p_hat},
            {"ci_low", r.estimate.ci_low},
            {"ci_high", r.estimate.ci_high},
            {"trials", r.estimate.trials},
            {"censored_fraction", r.censored_fraction},
            {"violations", r.violations}};
  if (r.t_hat) j["t_hat"] = *r.t_hat;
  return j;
}

Json to_json(const SuiteReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"property", f.property}, {"case", f.case_index}, {"message", f.message}});
  }
  Json j = {{"suite", r.suite},
            {"seed", r.seed},
            {"cases", r.cases},
            {"checks", r.checks},
            {"violations", r.violations},
            {"passed", r.passed()},
            {"failures", failures}};
  if (!r.passed()) j["reproducer"] = r.reproducer();
  return j;
}

std::string canonical_hash(const Json& j) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace consensus_lab
