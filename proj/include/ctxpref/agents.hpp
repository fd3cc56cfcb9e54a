#pragma once

// Three tiers of agents. Node agents (A1) sit at graph nodes and report
// detections; a follower (A2) is created when a car enters, records its trip
// and reports it on exit; the decision agent (A3) owns the knowledge store
// and answers with a spot suggestion whenever a car reaches a gate.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctxpref/knowledge.hpp"
#include "ctxpref/ltl.hpp"
#include "ctxpref/tableaux.hpp"
#include "ctxpref/world_graph.hpp"

namespace ctxpref::agents {

using knowledge::EventRecord;
using knowledge::SpecStore;
using knowledge::Timestamp;
using knowledge::Trip;
using knowledge::UserId;
using world::NodeId;
using world::WorldGraph;

class AgentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { NodeAgent, Follower, Decider };
std::string_view to_string(Role role);

enum class Rationale { Preferred, FallbackCandidate, NearestFree, NoSuggestion };
std::string_view to_string(Rationale rationale);

struct Candidate {
  NodeId spot;
  std::int64_t r = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct PreferenceDecision {
  UserId user;
  NodeId gate;
  std::optional<NodeId> suggestion;
  /// By r descending, then spot id.
  std::vector<Candidate> candidates;
  Rationale rationale = Rationale::NoSuggestion;
  /// The formula that was finally checked and its finished tree.
  ltl::Formula formula;
  tableaux::TruthTree tree;
  /// Formulas dropped from the store to resolve a contradiction.
  std::vector<ltl::Formula> removed;
  std::optional<std::string> warning;

  /// r of the suggested spot when it came from the candidates.
  std::optional<std::int64_t> suggestion_r() const;
  /// `suggest p018 (Preferred, r=7)`, `suggest p003 (NearestFree)`,
  /// `no suggestion (NoSuggestion)`.
  std::string summary() const;
};

// -- messages ---------------------------------------------------------------------

struct Detection {
  UserId user;
  NodeId node;
  Timestamp timestamp;
};
struct FollowUpdate {
  UserId user;
  NodeId node;
};
struct TripReport {
  Trip trip;
};
struct DecisionRequest {
  UserId user;
  NodeId gate;
};
struct Decision {
  PreferenceDecision decision;
};

using Payload = std::variant<Detection, FollowUpdate, TripReport, DecisionRequest, Decision>;

class AgentMessage {
 public:
  /// Throws AgentError when the payload may not come from this sender:
  /// detections come from node agents, trip reports from followers and
  /// decisions from the decision agent.
  AgentMessage(Role sender, Payload payload);

  Role sender() const { return sender_; }
  const Payload& payload() const { return payload_; }

 private:
  Role sender_;
  Payload payload_;
};

// -- A1 ---------------------------------------------------------------------------

enum class Transformation { Enter, Move, Exit };
std::string_view to_string(Transformation t);

struct Detected {
  EventRecord event;
  Transformation transformation;
};

/// Classifies a detection of `user`'s car at `node`. A gate sighting of a car
/// that is already inside means it is leaving. Throws AgentError for unknown
/// nodes or a car seen inside without having entered.
Detected a1_detect(const WorldGraph& g, const NodeId& node, const UserId& user, Timestamp timestamp);
WorldGraph apply(const WorldGraph& g, const Detected& d);

// -- A2 ---------------------------------------------------------------------------

class Follower {
 public:
  Follower(UserId user, NodeId gate, Timestamp entered);

  /// Throws AgentError once the follower is defunct.
  void update(const EventRecord& e, world::NodeKind kind);
  /// Completes the trip and retires the follower. Throws AgentError when
  /// already defunct.
  Trip finalize();

  bool defunct() const { return defunct_; }
  const Trip& trip() const { return trip_; }

 private:
  Trip trip_;
  bool defunct_ = false;
};

Follower a2_spawn(const UserId& user, const NodeId& gate, Timestamp entered);
Follower a2_update(Follower state, const EventRecord& e, world::NodeKind kind);
Trip a2_finalize(Follower& state);

// -- A3 ---------------------------------------------------------------------------

struct DecisionConfig {
  /// Offer the nearest free place when every learned candidate is taken.
  bool fallback_nearest = false;
};

/// Preference decision for `user` arriving at `gate`. Leaves the graph alone;
/// may remove formulas from `store` when they contradict the arrival.
PreferenceDecision a3_decide(SpecStore& store, const WorldGraph& g, const UserId& user, const NodeId& gate,
                             const DecisionConfig& config = {});

// -- the hierarchy ----------------------------------------------------------------------

struct SystemConfig {
  bool fallback_nearest = false;
  std::size_t never_gate_threshold = knowledge::kDefaultNeverGateThreshold;
};

/// Routes detections through A1, the followers and A3 over a single ordered
/// message queue.
class AgentSystem {
 public:
  explicit AgentSystem(WorldGraph graph, SystemConfig config = {}, SpecStore store = {});

  /// Feeds one detection and returns every message it caused, in delivery
  /// order.
  std::vector<AgentMessage> detect(const NodeId& node, const UserId& user, Timestamp timestamp);

  const WorldGraph& graph() const { return graph_; }
  const SpecStore& store() const { return store_; }
  const knowledge::EventLog& log() const { return log_; }
  const std::vector<Trip>& trips() const { return trips_; }
  std::size_t followers_alive() const { return followers_.size(); }

 private:
  void deliver(const AgentMessage& message);

  WorldGraph graph_;
  SystemConfig config_;
  SpecStore store_;
  knowledge::EventLog log_;
  std::map<UserId, Follower> followers_;
  std::vector<Trip> trips_;
  std::deque<AgentMessage> queue_;
  std::vector<AgentMessage> delivered_;
};

}  // namespace ctxpref::agents
