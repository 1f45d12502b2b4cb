#include "consensus_lab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>

namespace consensus_lab::cli {
namespace {

std::vector<InitialCondition> parse_initial_conditions(const Json& j, int n) {
  const std::string path = "initial_conditions";
  if (j.is_string()) {
    if (j.get<std::string>() != "default") {
      throw ConfigError(path, "expected \"default\" or a list of {name, x}");
    }
    return default_initial_conditions(n);
  }
  if (!j.is_array() || j.empty()) {
    throw ConfigError(path, "expected \"default\" or a non-empty list of {name, x}");
  }
  std::vector<InitialCondition> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    JsonObject o(j[i], path + "[" + std::to_string(i) + "]");
    InitialCondition ic;
    ic.name = o.string("name");
    const Json& x = o.raw("x");
    if (!x.is_array()) throw ConfigError(o.path("x"), "expected an array of numbers");
    for (const auto& v : x) {
      if (!v.is_number()) throw ConfigError(o.path("x"), "expected an array of numbers");
      ic.x.push_back(v.get<double>());
    }
    if (static_cast<int>(ic.x.size()) != n) {
      throw ConfigError(o.path("x"), "needs " + std::to_string(n) + " entries");
    }
    o.finish();
    out.push_back(std::move(ic));
  }
  return out;
}

BoundsBlock parse_bounds(JsonObject o) {
  BoundsBlock b;
  b.eta = o.optional_number("eta");
  b.q = o.optional_number("q");
  b.block_length = o.optional_count("B");
  if (o.has("interval_ends")) {
    b.interval_ends = interval_ends_from_json(o.raw("interval_ends"), o.path("interval_ends"));
  }
  b.theta0 = o.optional_number("theta0");
  b.basic_arc_count = o.optional_count("basic_arc_count");
  b.search_cap = o.optional_count("search_cap").value_or(kDefaultSearchCap);
  b.max_window = o.optional_count("max_window").value_or(kDefaultMaxWindow);
  if (b.search_cap < 1) throw ConfigError(o.path("search_cap"), "must be >= 1");
  if (b.max_window < 1) throw ConfigError(o.path("max_window"), "must be >= 1");
  o.finish();
  return b;
}

OutputBlock parse_output(JsonObject o) {
  OutputBlock out;
  if (o.has("out")) out.out = o.string("out");
  if (o.has("format")) {
    out.format = o.string("format");
    if (*out.format != "csv" && *out.format != "json") {
      throw ConfigError(o.path("format"), "expected \"csv\" or \"json\"");
    }
  }
  out.dump_graphs = o.boolean("dump_graphs", false);
  o.finish();
  return out;
}

// Structural parameters the bounds block leaves unset are taken from the
// process. theta0 always has to be given explicitly.
void fill_from_process(const GraphProcess::Params& params, BoundQuery& q) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ArcIndependentProcess> ||
                      std::is_same_v<P, AcyclicRestrictedProcess>) {
          if (!q.basic_arc_count) q.basic_arc_count = p.basic_graph.arc_count();
        } else if constexpr (std::is_same_v<P, ConnectivityIndependentProcess>) {
          if (!q.q) q.q = p.q;
        } else if constexpr (std::is_same_v<P, UniformlyJointProcess>) {
          if (!q.q) q.q = p.q;
          if (!q.block_length) q.block_length = p.block_length;
        } else if constexpr (std::is_same_v<P, InfinitelyJointProcess>) {
          if (!q.q) q.q = p.q;
          if (!q.interval_ends) q.interval_ends = p.interval_ends;
        } else if constexpr (std::is_same_v<P, BidirectionalProcess>) {
          fill_from_process(p.inner->params(), q);
        }
      },
      params);
}

}  // namespace

Config parse_config(const Json& document) {
  Config c;
  c.document = document;
  JsonObject o(document, "");
  if (o.has("n")) {
    const std::uint64_t n = o.count("n");
    if (n < 1 || n > 64) throw ConfigError("n", "must lie in [1, 64]");
    c.n = static_cast<int>(n);
  }
  auto need_n = [&](const char* key) {
    if (!c.n) throw ConfigError(key, "needs the top-level key 'n'");
    return *c.n;
  };
  if (o.has("process")) {
    c.process = process_from_json(o.raw("process"), "process", need_n("process"));
  }
  if (o.has("schedule")) c.schedule = schedule_from_json(o.raw("schedule"), "schedule");
  if (o.has("rule")) c.rule = rule_from_json(o.raw("rule"), "rule");
  if (o.has("initial_conditions")) {
    c.initial_conditions = parse_initial_conditions(o.raw("initial_conditions"),
                                                    need_n("initial_conditions"));
  }
  if (o.has("horizon")) {
    c.horizon = o.count("horizon");
    if (c.horizon < 1) throw ConfigError("horizon", "must be >= 1");
  }
  if (o.has("tol")) {
    c.tol = o.number("tol");
    if (!(c.tol > 0.0 && c.tol < 1.0)) throw ConfigError("tol", "must lie in (0, 1)");
  }
  if (o.has("trials")) {
    c.trials = o.count("trials");
    if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
  }
  if (o.has("seed")) c.seed = o.count("seed");
  if (o.has("epsilon")) {
    c.epsilon = o.number("epsilon");
    if (!(*c.epsilon > 0.0 && *c.epsilon < 1.0)) {
      throw ConfigError("epsilon", "must lie in (0, 1)");
    }
  }
  if (o.has("bounds")) c.bounds = parse_bounds(o.object("bounds"));
  if (o.has("output")) c.output = parse_output(o.object("output"));
  o.finish();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError("--config", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentSpec Config::experiment() const {
  if (!n) throw ConfigError("n", "missing");
  if (!process) throw ConfigError("process", "missing");
  if (!schedule) throw ConfigError("schedule", "missing");
  if (!rule) throw ConfigError("rule", "missing");
  ExperimentSpec spec{*process,
                      *schedule,
                      *rule,
                      initial_conditions.value_or(default_initial_conditions(*n)),
                      horizon,
                      tol,
                      trials,
                      seed,
                      epsilon};
  try {
    spec.validate();
  } catch (const InvalidInput& e) {
    // Messages start with the offending field name.
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find_first_of(": ")), msg);
  }
  return spec;
}

BoundQuery Config::bound_query() const {
  if (!n) throw ConfigError("n", "missing");
  if (!schedule) throw ConfigError("schedule", "missing");
  if (!epsilon) throw ConfigError("epsilon", "missing");
  BoundQuery q;
  q.n = *n;
  q.epsilon = *epsilon;
  q.schedule = *schedule;
  q.eta = bounds.eta;
  if (!q.eta && rule) q.eta = rule->eta(*n);
  q.q = bounds.q;
  q.block_length = bounds.block_length;
  q.interval_ends = bounds.interval_ends;
  q.theta0 = bounds.theta0;
  q.basic_arc_count = bounds.basic_arc_count;
  if (process) fill_from_process(process->params(), q);
  q.search_cap = bounds.search_cap;
  q.max_window = bounds.max_window;
  return q;
}

SufficiencyInputs Config::sufficiency_inputs() const {
  if (!n) throw ConfigError("n", "missing");
  if (!schedule) throw ConfigError("schedule", "missing");
  BoundQuery q;
  q.block_length = bounds.block_length;
  q.interval_ends = bounds.interval_ends;
  if (process) fill_from_process(process->params(), q);
  SufficiencyInputs in;
  in.schedule = *schedule;
  in.n = *n;
  in.interval_ends = q.interval_ends;
  in.block_length = q.block_length.value_or(1);
  return in;
}

}  // namespace consensus_lab::cli
