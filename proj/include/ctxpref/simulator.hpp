#pragma once

// Deterministic replay of parking scenarios through the agent hierarchy.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpref/agents.hpp"
#include "ctxpref/knowledge.hpp"
#include "ctxpref/world_graph.hpp"

namespace ctxpref::sim {

using agents::PreferenceDecision;
using knowledge::Timestamp;
using knowledge::UserId;
using world::NodeId;
using world::WorldGraph;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimelineEntry {
  Timestamp timestamp;
  UserId user;
  NodeId node;

  friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

struct ScenarioConfig {
  bool fallback_nearest = false;
  std::size_t never_gate_threshold = knowledge::kDefaultNeverGateThreshold;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Scenario {
  WorldGraph graph;
  /// Sorted by timestamp; equal timestamps keep input order.
  std::vector<TimelineEntry> timeline;
  ScenarioConfig config;
};

// File layout: graph lines, then an optional `config:` section of key=value
// lines (fallback_nearest, never_gate_threshold, seed), then `timeline:`
// followed by `timestamp,user,node` lines. Errors name the line.
Scenario load_scenario(std::string_view text);
std::string save_scenario(const Scenario& s);

struct DecisionRecord {
  Timestamp at;
  PreferenceDecision decision;
};

struct Stats {
  std::size_t decisions = 0;
  std::size_t trips = 0;
  std::size_t contradictions_resolved = 0;
  /// Trips that parked where the entry decision suggested.
  std::size_t suggestions_followed = 0;
  std::size_t followers_alive = 0;

  friend bool operator==(const Stats&, const Stats&) = default;
};

struct SimulationReport {
  std::vector<DecisionRecord> decisions;
  knowledge::SpecStore final_store;
  WorldGraph final_graph;
  Stats stats;
  std::uint64_t seed = 0;
};

/// State after one timeline entry has been processed.
struct Step {
  std::size_t index;
  const TimelineEntry& entry;
  const std::vector<agents::AgentMessage>& messages;
  const agents::AgentSystem& system;
};

using Observer = std::function<void(const Step&)>;

/// Throws ScenarioError on unknown nodes or detections the agents reject.
SimulationReport run(const Scenario& s, const Observer& observer = {});

/// Stable text rendering: stats, decisions, store, graph.
std::string format_report(const SimulationReport& report);

struct GeneratorParams {
  std::size_t users = 1;
  std::size_t trips_per_user = 1;
  /// Probability of heading for the favourite place rather than the
  /// alternative one.
  double spot_affinity = 0.8;
};

/// Synthetic timeline over `graph`: users take turns making trips from their
/// home gate to a place and back along shortest paths. Deterministic per
/// seed. Throws ScenarioError on non-positive counts, an affinity outside
/// [0, 1] or a graph without gates or at least two places.
Scenario generate(const WorldGraph& graph, std::uint64_t seed, const GeneratorParams& params);

}  // namespace ctxpref::sim
