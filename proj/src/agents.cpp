#include "ctxpref/agents.hpp"

#include <algorithm>
#include <set>

namespace ctxpref::agents {

using world::NodeKind;

std::string_view to_string(Role role) {
  switch (role) {
    case Role::NodeAgent: return "A1";
    case Role::Follower: return "A2";
    case Role::Decider: return "A3";
  }
  return "?";
}

std::string_view to_string(Rationale rationale) {
  switch (rationale) {
    case Rationale::Preferred: return "Preferred";
    case Rationale::FallbackCandidate: return "FallbackCandidate";
    case Rationale::NearestFree: return "NearestFree";
    case Rationale::NoSuggestion: return "NoSuggestion";
  }
  return "?";
}

std::string_view to_string(Transformation t) {
  switch (t) {
    case Transformation::Enter: return "enter";
    case Transformation::Move: return "move";
    case Transformation::Exit: return "exit";
  }
  return "?";
}

std::optional<std::int64_t> PreferenceDecision::suggestion_r() const {
  if (!suggestion) return std::nullopt;
  for (const auto& c : candidates) {
    if (c.spot == *suggestion) return c.r;
  }
  return std::nullopt;
}

std::string PreferenceDecision::summary() const {
  if (!suggestion) return "no suggestion (" + std::string(to_string(rationale)) + ")";
  std::string s = "suggest " + *suggestion + " (" + std::string(to_string(rationale));
  if (rationale != Rationale::NearestFree) {
    if (auto r = suggestion_r()) s += ", r=" + std::to_string(*r);
  }
  return s + ")";
}

AgentMessage::AgentMessage(Role sender, Payload payload) : sender_(sender), payload_(std::move(payload)) {
  std::optional<Role> required;
  if (std::holds_alternative<Detection>(payload_)) required = Role::NodeAgent;
  if (std::holds_alternative<TripReport>(payload_)) required = Role::Follower;
  if (std::holds_alternative<Decision>(payload_)) required = Role::Decider;
  if (required && *required != sender_) {
    throw AgentError("message from " + std::string(to_string(sender_)) + " may only be sent by " +
                     std::string(to_string(*required)));
  }
}

// -- A1 ---------------------------------------------------------------------------------

Detected a1_detect(const WorldGraph& g, const NodeId& node, const UserId& user, Timestamp timestamp) {
  if (!g.has_node(node)) throw AgentError("unknown node '" + node + "'");
  const NodeKind kind = g.kind(node);
  if (kind == NodeKind::Car) throw AgentError("'" + node + "' is a car, not a location");
  const bool inside = world::car_position(g, user).has_value();
  Transformation t = Transformation::Move;
  if (kind == NodeKind::Gate) {
    t = inside ? Transformation::Exit : Transformation::Enter;
  } else if (!inside) {
    throw AgentError(user + " detected at " + node + " without entering");
  }
  return {EventRecord{user, node, timestamp}, t};
}

WorldGraph apply(const WorldGraph& g, const Detected& d) {
  try {
    switch (d.transformation) {
      case Transformation::Enter: return world::car_enters(g, d.event.user, d.event.node);
      case Transformation::Move: return world::car_moves(g, d.event.user, d.event.node);
      case Transformation::Exit: return world::car_exits(g, d.event.user);
    }
  } catch (const world::GraphError& e) {
    throw AgentError(e.what());
  }
  return g;
}

// -- A2 ---------------------------------------------------------------------------------

Follower::Follower(UserId user, NodeId gate, Timestamp entered)
    : trip_{user, gate, std::nullopt, std::nullopt, {EventRecord{user, gate, entered}}} {}

void Follower::update(const EventRecord& e, NodeKind kind) {
  if (defunct_) throw AgentError("follower of " + trip_.user + " is defunct");
  trip_.events.push_back(e);
  if (kind == NodeKind::Place) trip_.parked_spot = e.node;
  if (kind == NodeKind::Gate) trip_.exit_gate = e.node;
}

Trip Follower::finalize() {
  if (defunct_) throw AgentError("follower of " + trip_.user + " is defunct");
  defunct_ = true;
  return trip_;
}

Follower a2_spawn(const UserId& user, const NodeId& gate, Timestamp entered) { return Follower(user, gate, entered); }

Follower a2_update(Follower state, const EventRecord& e, NodeKind kind) {
  state.update(e, kind);
  return state;
}

Trip a2_finalize(Follower& state) { return state.finalize(); }

// -- A3 ---------------------------------------------------------------------------------

PreferenceDecision a3_decide(SpecStore& store, const WorldGraph& g, const UserId& user, const NodeId& gate,
                             const DecisionConfig& config) {
  if (!g.has_node(gate) || g.kind(gate) != NodeKind::Gate) throw AgentError("'" + gate + "' is not a gate");
  const auto observation = ltl::Formula::atom(gate);

  auto formula = knowledge::spec_formula(store, user, observation);
  auto tree = tableaux::build_tree(formula);
  std::vector<ltl::Formula> removed;
  std::optional<std::string> warning;
  if (!tree.is_open()) {
    auto resolution = knowledge::resolve_contradiction(store, user, observation);
    store = std::move(resolution.store);
    removed = std::move(resolution.removed);
    warning = std::move(resolution.warning);
    formula = knowledge::spec_formula(store, user, observation);
    tree = tableaux::build_tree(formula);
  }

  std::set<NodeId> spots;
  for (const auto& c : tableaux::open_consequences(tree)) {
    for (const auto& a : c.atoms) {
      if (g.has_node(a) && g.kind(a) == NodeKind::Place) spots.insert(a);
    }
  }
  const auto triples = knowledge::relevant_triples(store, user, observation);
  std::vector<Candidate> candidates;
  for (const auto& spot : spots) {
    std::int64_t r = 0;
    for (const auto& t : triples) {
      if (ltl::atoms(t.formula).contains(spot)) r = std::max(r, t.r);
    }
    candidates.push_back({spot, r});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.r != b.r ? a.r > b.r : a.spot < b.spot;
  });

  PreferenceDecision d{user, gate, std::nullopt, candidates, Rationale::NoSuggestion,
                       formula, std::move(tree), std::move(removed), std::move(warning)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (world::is_free(g, candidates[i].spot)) {
      d.suggestion = candidates[i].spot;
      d.rationale = i == 0 ? Rationale::Preferred : Rationale::FallbackCandidate;
      return d;
    }
  }
  if (config.fallback_nearest) {
    if (auto nearest = world::nearest_free_spot(g, gate)) {
      d.suggestion = nearest;
      d.rationale = Rationale::NearestFree;
    }
  }
  return d;
}

// -- hierarchy ------------------------------------------------------------------------------

AgentSystem::AgentSystem(WorldGraph graph, SystemConfig config, SpecStore store)
    : graph_(std::move(graph)), config_(config), store_(std::move(store)) {}

std::vector<AgentMessage> AgentSystem::detect(const NodeId& node, const UserId& user, Timestamp timestamp) {
  // Validate up front so a rejected detection leaves no trace.
  const Detected d = a1_detect(graph_, node, user, timestamp);
  knowledge::EventLog log = log_;
  log.record(d.event);
  WorldGraph next = apply(graph_, d);
  log_ = std::move(log);
  graph_ = std::move(next);

  delivered_.clear();
  queue_.emplace_back(Role::NodeAgent, Detection{user, node, timestamp});
  while (!queue_.empty()) {
    AgentMessage message = std::move(queue_.front());
    queue_.pop_front();
    deliver(message);
    delivered_.push_back(std::move(message));
  }
  return delivered_;
}

void AgentSystem::deliver(const AgentMessage& message) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Detection>) {
          // The graph already reflects this detection.
          if (!followers_.contains(m.user)) {
            followers_.emplace(m.user, a2_spawn(m.user, m.node, m.timestamp));
            queue_.emplace_back(Role::NodeAgent, DecisionRequest{m.user, m.node});
          } else {
            queue_.emplace_back(Role::NodeAgent, FollowUpdate{m.user, m.node});
          }
        } else if constexpr (std::is_same_v<T, FollowUpdate>) {
          Follower& follower = followers_.at(m.user);
          const NodeKind kind = graph_.kind(m.node);
          follower.update(log_.events().back(), kind);
          if (kind == NodeKind::Gate) {
            Trip trip = follower.finalize();
            followers_.erase(m.user);
            queue_.emplace_back(Role::Follower, TripReport{std::move(trip)});
          }
        } else if constexpr (std::is_same_v<T, TripReport>) {
          trips_.push_back(m.trip);
          for (const auto& f : knowledge::mine_trip(m.trip)) store_.upsert(m.trip.user, f);
          store_ = knowledge::infer_never_gates(std::move(store_), m.trip.user, trips_, graph_,
                                                config_.never_gate_threshold);
        } else if constexpr (std::is_same_v<T, DecisionRequest>) {
          auto decision = a3_decide(store_, graph_, m.user, m.gate, DecisionConfig{config_.fallback_nearest});
          queue_.emplace_back(Role::Decider, Decision{std::move(decision)});
        }
      },
      message.payload());
}

}  // namespace ctxpref::agents
