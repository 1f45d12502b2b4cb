#include <gtest/gtest.h>

#include "consensus_lab/json_io.hpp"

using namespace consensus_lab;

namespace {

std::string error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST(JsonIo, DigraphIsOneBased) {
  Digraph g(3);
  g.add_arc(0, 2);
  g.add_arc(2, 1);
  const Json j = to_json(g);
  EXPECT_EQ(j, Json::parse(R"({"n":3,"arcs":[[1,3],[3,2]]})"));
  EXPECT_EQ(digraph_from_json(j, "g"), g);
  EXPECT_EQ(digraph_from_json("complete", "g", 4), Digraph::complete(4));
  EXPECT_EQ(error_key([] { digraph_from_json(Json::parse(R"({"n":2,"arcs":[[1,1]]})"), "g"); })
                .rfind("g.arcs", 0),
            0u);
}

TEST(JsonIo, ScheduleRoundTrip) {
  for (const auto& s :
       {ProbabilitySchedule::constant(0.3), ProbabilitySchedule::power_decay(0.9, 0.5, 0.8),
        ProbabilitySchedule::geometric(0.7, 0.9, 0.5),
        ProbabilitySchedule::explicit_list({0.1, 0.2}, 0.05)}) {
    const auto back = schedule_from_json(to_json(s), "schedule");
    for (std::uint64_t k = 0; k < 10; ++k) EXPECT_EQ(back.value(k), s.value(k));
  }
  EXPECT_EQ(error_key([] {
              schedule_from_json(Json::parse(R"({"kind":"constant","p":1.2})"), "schedule");
            }),
            "schedule");
  EXPECT_EQ(error_key([] {
              schedule_from_json(Json::parse(R"({"kind":"constant","p":0.2,"x":1})"),
                                 "schedule");
            }),
            "schedule.x");
}

TEST(JsonIo, ProcessKinds) {
  const auto arc = process_from_json(
      Json::parse(R"({"kind":"arc_independent","theta":0.5})"), "process", 3);
  EXPECT_EQ(arc.kind(), ProcessKind::arc_independent);
  EXPECT_EQ(std::get<ArcIndependentProcess>(arc.params()).basic_graph, Digraph::complete(3));
  EXPECT_DOUBLE_EQ(std::get<ArcIndependentProcess>(arc.params()).theta_floor, 0.5);

  const auto ci = process_from_json(
      Json::parse(R"({"kind":"connectivity_independent","q":0.7,"filler_arc_prob":0.1})"),
      "process", 4);
  EXPECT_EQ(ci.kind(), ProcessKind::connectivity_independent);

  const auto bi = process_from_json(
      Json::parse(R"({"kind":"bidirectional","inner":{"kind":"uniformly_joint","q":0.5,"B":2}})"),
      "process", 4);
  EXPECT_EQ(bi.kind(), ProcessKind::bidirectional);

  const auto ij = process_from_json(
      Json::parse(
          R"({"kind":"infinitely_joint","q":0.5,"interval_ends":{"kind":"power","scale":2,"exponent":1.5}})"),
      "process", 4);
  EXPECT_EQ(ij.kind(), ProcessKind::infinitely_joint);

  EXPECT_EQ(error_key([] {
              process_from_json(Json::parse(R"({"kind":"arc_independent","theta":[0.5]})"),
                                "process", 3);
            }),
            "process.theta");
  EXPECT_EQ(error_key([] { process_from_json(Json::parse(R"({"kind":"magic"})"), "process", 3); }),
            "process.kind");
}

TEST(JsonIo, ProcessRoundTrip) {
  const auto p = process_from_json(
      Json::parse(R"({"kind":"arc_independent","basic_graph":{"n":3,"arcs":[[1,2],[2,3]]},
                      "theta":[0.4,0.9],"theta_floor":0.3})"),
      "process", 3);
  const Json j = to_json(p);
  EXPECT_EQ(to_json(process_from_json(j, "process", 3)), j);
}

TEST(JsonIo, Rules) {
  EXPECT_EQ(rule_from_json(Json::parse(R"({"kind":"self_confident","a_star":0.6})"), "rule")
                .a_star(),
            0.6);
  EXPECT_EQ(error_key([] {
              rule_from_json(Json::parse(R"({"kind":"self_confident","a_star":0.4})"), "rule");
            }),
            "rule.a_star");
}

TEST(JsonIo, BoundResult) {
  BoundResult r;
  r.value = 7;
  r.audit.terms = 3;
  EXPECT_EQ(to_json(r)["bound"], 7);
  r.value.reset();
  EXPECT_EQ(to_json(r)["bound"], "unbounded");
}

TEST(JsonIo, TrialCsv) {
  TrialRecord r;
  r.recorded_steps = {0, 1, 2};
  r.h_seq = {1.0, 0.5, 0.25};
  r.psi_seq = {1, 0};
  EXPECT_EQ(trial_csv(r), "k,H,psi\n0,1,1\n1,0.5,0\n2,0.25,\n");
}

TEST(JsonIo, CanonicalHashIgnoresKeyOrder) {
  const auto a = Json::parse(R"({"a":1,"b":[1,2,{"c":true}]})");
  const auto b = Json::parse(R"({"b":[1,2,{"c":true}],"a":1})");
  EXPECT_EQ(canonical_hash(a), canonical_hash(b));
  EXPECT_EQ(canonical_hash(a).size(), 16u);
  EXPECT_NE(canonical_hash(a), canonical_hash(Json::parse(R"({"a":2})")));
}

TEST(JsonObject, CountsAndUnknownKeys) {
  const auto j = Json::parse(R"({"a":3.0,"b":2.5,"c":-1,"d":"x"})");
  JsonObject o(j, "root");
  EXPECT_EQ(o.count("a"), 3u);
  EXPECT_THROW(o.count("b"), ConfigError);
  EXPECT_THROW(o.count("c"), ConfigError);
  EXPECT_THROW(o.number("d"), ConfigError);
  EXPECT_NO_THROW(o.finish());
  JsonObject o2(j, "");
  o2.number("a");
  EXPECT_EQ(error_key([&] { o2.finish(); }), "b");
}
