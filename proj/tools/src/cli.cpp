#include "consensus_lab/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "consensus_lab/cli/config.hpp"
#include "consensus_lab/errors.hpp"
#include "consensus_lab/property_suites.hpp"

#ifndef CONSENSUS_LAB_VERSION
#define CONSENSUS_LAB_VERSION "0.0.0"
#endif

namespace consensus_lab::cli {
namespace {

constexpr const char* kDictionaryNote =
    "sup over initial states approximated by the listed initial conditions";

struct Globals {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dump_graphs = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

unsigned resolve_threads(const Globals& g) {
  if (g.threads) return *g.threads;
  if (const char* env = std::getenv("CONSENSUS_LAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
      throw UsageError("CONSENSUS_LAB_THREADS must be a non-negative integer");
    }
    return static_cast<unsigned>(v);
  }
  return 0;
}

Config load(const Globals& g) {
  if (g.config.empty()) throw UsageError("--config is required for this subcommand");
  Config c = load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::string output_format(const Globals& g, const Config& c, const char* fallback) {
  if (!g.format.empty()) return g.format;
  return c.output.format.value_or(fallback);
}

std::optional<std::string> output_path(const Globals& g, const Config& c) {
  if (!g.out.empty()) return g.out;
  return c.output.out;
}

void emit(const std::string& payload, const std::optional<std::string>& path,
          std::ostream& out) {
  if (!path) {
    out << payload;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + *path + "'");
  f << payload;
  if (!f) throw std::runtime_error("failed writing '" + *path + "'");
}

Json metadata(const Config& c) {
  Json hashed = c.document;
  hashed.erase("output");
  hashed["seed"] = c.seed;
  return {{"tool", "consensus_lab"},
          {"version", CONSENSUS_LAB_VERSION},
          {"spec_hash", canonical_hash(hashed)},
          {"seed", c.seed},
          {"initial_conditions_note", kDictionaryNote},
          {"timestamp", utc_timestamp()}};
}

void dump_graphs(const ExperimentSpec& spec, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  TrialOptions to;
  to.horizon = spec.horizon;
  to.tol = spec.tol;
  to.epsilon = spec.epsilon;
  to.record_h = false;
  to.record_psi = false;
  to.graph_observer = [&](std::uint64_t k, const Digraph& g) {
    Json line = to_json(g);
    line["k"] = k;
    f << line.dump() << '\n';
  };
  run_trial(spec.process, spec.schedule, spec.rule, spec.initial_conditions.front().x, to,
            RngStream(spec.master_seed, 0));
}

int cmd_simulate(const Globals& g, std::ostream& out, std::ostream& err) {
  const Config c = load(g);
  const ExperimentSpec spec = c.experiment();
  const std::string format = output_format(g, c, "json");
  const auto path = output_path(g, c);
  const bool want_graphs = g.dump_graphs || c.output.dump_graphs;
  if (want_graphs && !path) throw UsageError("--dump-graphs needs --out");

  RunOptions ro;
  ro.threads = resolve_threads(g);
  const ExperimentResult result = run_experiment(spec, ro);
  const ConsensusReport report = summarize_consensus(spec, result);
  std::optional<TcomEstimate> tcom;
  if (spec.epsilon) tcom = summarize_tcom(spec, result);

  std::string payload;
  if (format == "json") {
    Json j = {{"metadata", metadata(c)},
              {"config", c.document},
              {"consensus", to_json(report)},
              {"invariants",
               {{"checked_trials", result.checked_trials},
                {"violations", result.violations},
                {"first_violation", result.first_violation}}}};
    if (tcom) j["tcom"] = to_json(*tcom);
    payload = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "initial_condition,p_hat,ci_low,ci_high,successes,trials,t_hat,censored\n";
    auto row = [&](const std::string& name, const ConsensusEstimate& e,
                   const std::optional<std::uint64_t>& t) {
      os << name << ',' << fmt(e.p_hat) << ',' << fmt(e.ci_low) << ',' << fmt(e.ci_high)
         << ',' << e.successes << ',' << e.trials << ',' << fmt(t) << ','
         << (tcom ? (t ? "false" : "true") : "") << '\n';
    };
    for (std::size_t i = 0; i < report.names.size(); ++i) {
      row(report.names[i], report.per_condition[i],
          tcom ? tcom->per_condition[i] : std::nullopt);
    }
    row("pooled", report.pooled, tcom ? tcom->t_hat : std::nullopt);
    payload = os.str();
  }
  emit(payload, path, out);
  if (want_graphs) dump_graphs(spec, *path + ".graphs.ndjson");
  if (result.violations > 0) {
    err << "invariant violations: " << result.violations << " (first: "
        << result.first_violation << ")\n";
    return kExitViolation;
  }
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError("--values has an empty entry");
    item = item.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw UsageError("--values: '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("--values must list at least one value");
  return values;
}

int cmd_sweep(const Globals& g, const std::string& param, const std::string& values_text,
              std::ostream& out, std::ostream& err) {
  const SweepParam p = [&] {
    try {
      return parse_sweep_param(param);
    } catch (const InvalidInput& e) {
      throw UsageError(std::string("--param: ") + e.what());
    }
  }();
  const std::vector<double> values = parse_values(values_text);
  const Config c = load(g);
  const ExperimentSpec base = c.experiment();
  RunOptions ro;
  ro.threads = resolve_threads(g);
  const std::vector<SweepRow> rows = parameter_sweep(base, p, values, ro);

  std::string payload;
  if (output_format(g, c, "csv") == "csv") {
    std::ostringstream os;
    os << "param_value,p_hat,ci_low,ci_high,trials,censored_fraction\n";
    for (const auto& r : rows) {
      os << fmt(r.value) << ',' << fmt(r.estimate.p_hat) << ',' << fmt(r.estimate.ci_low)
         << ',' << fmt(r.estimate.ci_high) << ',' << r.estimate.trials << ','
         << fmt(r.censored_fraction) << '\n';
    }
    payload = os.str();
  } else {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(to_json(r));
    Json j = {{"metadata", metadata(c)}, {"param", to_string(p)}, {"rows", arr}};
    payload = j.dump(2) + "\n";
  }
  emit(payload, output_path(g, c), out);
  std::uint64_t violations = 0;
  for (const auto& r : rows) violations += r.violations;
  if (violations > 0) {
    err << "invariant violations: " << violations << "\n";
    return kExitViolation;
  }
  return kExitOk;
}

Json conditions(const Config& c) {
  const SufficiencyInputs in = c.sufficiency_inputs();
  Json j = {{"non_increasing", in.schedule.is_non_increasing()}};
  std::vector<SufficiencyCondition> conds = {SufficiencyCondition::power_sum_uniform,
                                             SufficiencyCondition::acyclic_uniform,
                                             SufficiencyCondition::arc_independent};
  if (in.interval_ends) {
    conds.push_back(SufficiencyCondition::bidirectional_subsequence);
    conds.push_back(SufficiencyCondition::acyclic_infinite);
  }
  for (auto cond : conds) j[to_string(cond)] = check_sufficiency(cond, in);
  return j;
}

int cmd_bounds(const Globals& g, const std::string& which, std::ostream& out) {
  const Config c = load(g);
  Json j;
  if (which == "conditions") {
    j = conditions(c);
  } else {
    const BoundQuery q = c.bound_query();
    BoundResult r;
    if (which == "thm1") {
      r = tcom_lower_bound(q);
    } else if (which == "thm5") {
      r = tcom_upper_connectivity_independent(q);
    } else if (which == "prop1") {
      r = tcom_upper_uniform_joint(q);
    } else if (which == "prop2") {
      r = tcom_upper_bidirectional(q);
    } else {
      r = tcom_upper_arc_independent(q);
    }
    j = to_json(r);
    j["which"] = which;
  }
  emit(j.dump(2) + "\n", output_path(g, c), out);
  return kExitOk;
}

int cmd_verify(const Globals& g, const std::string& suite, std::uint64_t cases,
               std::ostream& out, std::ostream& err) {
  if (cases < 1 || cases > std::numeric_limits<std::uint32_t>::max()) {
    throw UsageError("--cases must lie in [1, 2^32)");
  }
  const SuiteReport r =
      run_suite(suite, static_cast<std::uint32_t>(cases), g.seed.value_or(0));
  const std::optional<std::string> path =
      g.out.empty() ? std::nullopt : std::optional<std::string>(g.out);
  emit(to_json(r).dump(2) + "\n", path, out);
  if (!r.passed()) {
    err << r.violations << " violation(s); first: " << r.failures.front().message << "\n"
        << "reproducer: " << r.reproducer() << "\n";
    return kExitViolation;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized consensus simulation, bound evaluation and property checks",
               "consensus_lab"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "Write the result payload to this file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--threads", g.threads,
                 "Worker threads (default: CONSENSUS_LAB_THREADS, else all cores)");
  app.add_flag("--dump-graphs", g.dump_graphs,
               "Also write the sampled graphs of one trial to <out>.graphs.ndjson");

  auto* simulate = app.add_subcommand("simulate", "Estimate consensus probability and T_com");

  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter; one row per value");
  sweep->add_option("--param", param, "beta, c, q, theta0, a_star or epsilon")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  std::string which;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  bounds->add_option("--which", which, "thm1, thm5, prop1, prop2, eq-a8 or conditions")
      ->required()
      ->check(CLI::IsMember({"thm1", "thm5", "prop1", "prop2", "eq-a8", "conditions"}));

  std::string suite;
  std::uint64_t cases = 100;
  auto* verify = app.add_subcommand("verify", "Run a randomized property suite");
  verify->add_option("--suite", suite, "matrix, graph or engine")->required();
  verify->add_option("--cases", cases, "Number of random cases")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, out, err);
    if (sweep->parsed()) return cmd_sweep(g, param, values, out, err);
    if (bounds->parsed()) return cmd_bounds(g, which, out);
    if (verify->parsed()) return cmd_verify(g, suite, cases, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace consensus_lab::cli
