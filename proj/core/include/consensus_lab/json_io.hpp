#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "consensus_lab/bounds.hpp"
#include "consensus_lab/consensus.hpp"
#include "consensus_lab/digraph.hpp"
#include "consensus_lab/errors.hpp"
#include "consensus_lab/graph_process.hpp"
#include "consensus_lab/interval_ends.hpp"
#include "consensus_lab/montecarlo.hpp"
#include "consensus_lab/property_suites.hpp"
#include "consensus_lab/schedule.hpp"
#include "consensus_lab/stochastic_matrix.hpp"

namespace consensus_lab {

using Json = nlohmann::json;

/// Invalid document; key() is the dotted path of the offending key.
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidInput("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Typed, path-aware access to one JSON object. Unknown keys are rejected
/// by finish().
class JsonObject {
 public:
  JsonObject(const Json& j, std::string path);

  bool has(std::string_view key) const;
  const Json& raw(std::string_view key);
  double number(std::string_view key);
  std::optional<double> optional_number(std::string_view key);
  std::uint64_t count(std::string_view key);
  std::optional<std::uint64_t> optional_count(std::string_view key);
  std::string string(std::string_view key);
  bool boolean(std::string_view key, bool fallback);
  JsonObject object(std::string_view key);

  std::string path(std::string_view key) const;
  /// Throws ConfigError for any key that was never read.
  void finish(std::initializer_list<std::string_view> also_allowed = {}) const;

 private:
  const Json& at(std::string_view key);

  const Json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

/// {"n": n, "arcs": [[from, to], ...]} with 1-based, sorted arcs.
Json to_json(const Digraph& g);
/// Also accepts the string "complete" given n.
Digraph digraph_from_json(const Json& j, const std::string& path, int n_hint = 0);

Json to_json(const StochasticMatrix& m);
Json to_json(const ProbabilitySchedule& s);
ProbabilitySchedule schedule_from_json(const Json& j, const std::string& path);
Json to_json(const IntervalEnds& e);
IntervalEnds interval_ends_from_json(const Json& j, const std::string& path);
Json to_json(const GraphProcess& p);
GraphProcess process_from_json(const Json& j, const std::string& path, int n);
Json to_json(const WeightRule& r);
WeightRule rule_from_json(const Json& j, const std::string& path);

Json to_json(const TrialRecord& r);
/// "k,H,psi" rows; psi is empty on the last row (no step taken from it).
std::string trial_csv(const TrialRecord& r);

/// {"bound": int | "unbounded", "audit": {...}}
Json to_json(const BoundResult& r);
Json to_json(const ConsensusEstimate& e);
Json to_json(const ConsensusReport& r);
Json to_json(const TcomEstimate& t);
Json to_json(const SweepRow& r);
Json to_json(const SuiteReport& r);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
std::string canonical_hash(const Json& j);

}  // namespace consensus_lab
