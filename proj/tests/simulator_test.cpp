#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ctxpref/simulator.hpp"

namespace ctxpref::sim {
namespace {

using ltl::parse;

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(CTXPREF_SCENARIO_DIR) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Scenario scenario(const std::string& name) { return load_scenario(slurp(name)); }

const PreferenceDecision& last(const SimulationReport& r) { return r.decisions.back().decision; }

TEST(Scenarios, Preference) {
  const auto report = run(scenario("preference.scn"));
  EXPECT_EQ(report.final_store.find("idKR55", parse("g2 -> F p018")), 7);
  EXPECT_EQ(report.final_store.find("idKR55", parse("g2 -> F p015")), 2);
  EXPECT_EQ(last(report).summary(), "suggest p018 (Preferred, r=7)");
  EXPECT_EQ(report.stats.decisions, 10u);
  EXPECT_EQ(report.stats.trips, 9u);
  EXPECT_EQ(report.stats.followers_alive, 1u);
  EXPECT_EQ(report.stats.contradictions_resolved, 0u);
}

TEST(Scenarios, PreferredSpotOccupied) {
  const auto report = run(scenario("preference_occupied.scn"));
  EXPECT_EQ(last(report).summary(), "suggest p015 (FallbackCandidate, r=2)");
}

TEST(Scenarios, AllCandidatesOccupied) {
  EXPECT_EQ(last(run(scenario("preference_full.scn"))).summary(), "no suggestion (NoSuggestion)");
  const auto nearest = run(scenario("preference_nearest.scn"));
  EXPECT_EQ(last(nearest).summary(), "suggest p009 (NearestFree)");
  EXPECT_FALSE(world::occupant(nearest.final_graph, "p009").has_value());
}

TEST(Scenarios, Contradiction) {
  const auto report = run(scenario("contradiction.scn"));
  EXPECT_EQ(report.stats.contradictions_resolved, 1u);
  EXPECT_FALSE(report.final_store.contains("idKR55", parse("G !g3")));
  EXPECT_TRUE(report.final_store.contains("idKR55", parse("G !g2")));
  const auto it = std::find_if(report.decisions.begin(), report.decisions.end(),
                               [](const DecisionRecord& r) { return !r.decision.removed.empty(); });
  ASSERT_NE(it, report.decisions.end());
  EXPECT_EQ(it->decision.gate, "g3");
  EXPECT_EQ(it->decision.removed, std::vector{parse("G !g3")});
  EXPECT_TRUE(it->decision.tree.is_open());
}

TEST(Scenarios, Empty) {
  const auto report = run(scenario("empty.scn"));
  EXPECT_EQ(report.stats, Stats{});
  EXPECT_TRUE(report.decisions.empty());
  EXPECT_TRUE(report.final_store.empty());
}

TEST(Scenarios, ReportsAreByteIdentical) {
  for (const char* name : {"preference.scn", "preference_nearest.scn", "contradiction.scn"}) {
    EXPECT_EQ(format_report(run(scenario(name))), format_report(run(scenario(name)))) << name;
  }
}

TEST(Scenarios, ReportLayout) {
  const auto text = format_report(run(scenario("preference.scn")));
  EXPECT_EQ(text.rfind("seed: 0\nstats: decisions=10 trips=9 contradictions_resolved=0 ", 0), 0u);
  EXPECT_NE(text.find("candidates: p018 r=7 p015 r=2\nsuggest p018 (Preferred, r=7)\n\nstore:\n"), std::string::npos);
  EXPECT_NE(text.find("idKR55\tg2 -> F p018\t7\n"), std::string::npos);
  EXPECT_NE(text.find("\ngraph:\n"), std::string::npos);
}

TEST(Invariants, CarsAreConservedAndNeverDoubleParked) {
  for (const char* name : {"preference.scn", "preference_full.scn", "contradiction.scn"}) {
    const auto s = scenario(name);
    std::set<std::string> inside;
    run(s, [&](const Step& step) {
      const auto& g = step.system.graph();
      EXPECT_EQ(world::check_invariants(g), std::nullopt);
      const bool gate = g.kind(step.entry.node) == world::NodeKind::Gate;
      if (gate && inside.contains(step.entry.user)) {
        inside.erase(step.entry.user);
      } else if (gate) {
        inside.insert(step.entry.user);
      }
      EXPECT_EQ(g.nodes_of(world::NodeKind::Car).size(), inside.size());
      EXPECT_EQ(step.system.followers_alive(), inside.size());
    });
  }
}

TEST(Invariants, SuggestionsAreFreeOnArrival) {
  for (const char* name : {"preference.scn", "preference_occupied.scn", "preference_nearest.scn"}) {
    run(scenario(name), [](const Step& step) {
      for (const auto& m : step.messages) {
        if (const auto* d = std::get_if<agents::Decision>(&m.payload())) {
          if (d->decision.suggestion) {
            EXPECT_TRUE(world::is_free(step.system.graph(), *d->decision.suggestion));
          }
        }
      }
    });
  }
}

TEST(Invariants, AbsentUsersHaveNoFollower) {
  const auto s = scenario("preference_full.scn");
  const auto report = run(s);
  EXPECT_EQ(report.stats.followers_alive, 3u);
  EXPECT_EQ(report.final_graph.nodes_of(world::NodeKind::Car).size(), 3u);
}

TEST(Load, ConfigAndOrdering) {
  const std::string text =
      "g1 G\np1 P\ng1 -> p1 road\n"
      "config:\nfallback_nearest=true\nnever_gate_threshold=5\nseed=42\n"
      "timeline:\n"
      "2014-01-28T08:02:00,u,g1\n"
      "t2014.01.28.08.00.00,u,g1\n"
      "2014-01-28T08:01:00,u,p1\n";
  const auto s = load_scenario(text);
  EXPECT_EQ(s.config, (ScenarioConfig{true, 5, 42}));
  ASSERT_EQ(s.timeline.size(), 3u);
  EXPECT_EQ(s.timeline[0].timestamp.to_iso(), "2014-01-28T08:00:00");
  EXPECT_EQ(s.timeline[1].node, "p1");
  const auto again = load_scenario(save_scenario(s));
  EXPECT_EQ(again.graph, s.graph);
  EXPECT_EQ(again.timeline, s.timeline);
  EXPECT_EQ(again.config, s.config);
}

void expect_error(const std::string& text, const std::string& needle) {
  try {
    load_scenario(text);
    FAIL() << "accepted: " << text;
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(Load, Errors) {
  const std::string graph = "g1 G\np1 P\ng1 -> p1 road\n";
  expect_error(graph + "timeline:\n2014-01-28T08:00:00,u\n", "line 5: expected timestamp,user,node");
  expect_error(graph + "timeline:\nyesterday,u,g1\n", "line 5: bad timestamp");
  expect_error(graph + "timeline:\n2014-01-28T08:00:00,u,g9\n", "line 5: unknown node 'g9'");
  expect_error(graph + "config:\ncolour=red\ntimeline:\n", "line 5: unknown setting 'colour'");
  expect_error(graph + "config:\nseed=x\n", "line 5: bad value for seed");
  expect_error("g1 X\n", "line 1");
}

TEST(Run, RejectedDetectionsNameTheEntry) {
  Scenario s = load_scenario("g1 G\nr1 R\ng1 -> r1 road\ntimeline:\n2014-01-28T08:00:00,u,r1\n");
  try {
    run(s);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("timeline entry 1 (2014-01-28T08:00:00,u,r1): ", 0), 0u) << e.what();
  }
}

TEST(Generate, Deterministic) {
  const auto graph = scenario("empty.scn").graph;
  const GeneratorParams p{3, 4, 0.7};
  const auto a = generate(graph, 9, p);
  const auto b = generate(graph, 9, p);
  EXPECT_EQ(a.timeline, b.timeline);
  EXPECT_EQ(a.config.rng_seed, 9u);
  EXPECT_NE(generate(graph, 10, p).timeline, a.timeline);
}

TEST(Generate, ReplaysCleanly) {
  const auto graph = scenario("empty.scn").graph;
  const auto s = generate(graph, 1, {1, 9, 0.78});
  const auto report = run(s);
  EXPECT_EQ(report.stats.trips, 9u);
  EXPECT_EQ(report.stats.decisions, 9u);
  EXPECT_EQ(report.stats.followers_alive, 0u);
  std::int64_t total = 0;
  for (const auto& t : report.final_store.triples()) {
    if (t.formula.op() == ltl::Op::Implies) total += t.r;
  }
  EXPECT_EQ(total, 9);
}

TEST(Generate, AffinityExtremes) {
  const auto graph = scenario("empty.scn").graph;
  for (double affinity : {0.0, 1.0}) {
    const auto report = run(generate(graph, 5, {2, 6, affinity}));
    std::map<std::string, std::set<std::string>> spots;
    for (const auto& t : report.final_store.triples()) {
      if (t.formula.op() == ltl::Op::Implies) {
        spots[t.user].insert(ltl::print(t.formula));
        EXPECT_EQ(t.r, 6);
      }
    }
    EXPECT_EQ(spots.size(), 2u);
    for (const auto& [user, set] : spots) EXPECT_EQ(set.size(), 1u) << user;
  }
}

TEST(Generate, RejectsBadParameters) {
  const auto graph = scenario("empty.scn").graph;
  EXPECT_THROW(generate(graph, 1, {0, 1, 0.5}), ScenarioError);
  EXPECT_THROW(generate(graph, 1, {1, 0, 0.5}), ScenarioError);
  EXPECT_THROW(generate(graph, 1, {1, 1, 1.5}), ScenarioError);
  EXPECT_THROW(generate(world::load_graph("g1 G\np1 P\ng1 -> p1 road\n"), 1, {}), ScenarioError);
}

}  // namespace
}  // namespace ctxpref::sim
