#pragma once

// What the system knows about each user: raw detections, the trips they
// form, and the mined specification triples <user, formula, r> where r
// counts how often the behaviour was seen.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxpref/ltl.hpp"
#include "ctxpref/world_graph.hpp"

namespace ctxpref::knowledge {

using UserId = std::string;
using world::NodeId;

class KnowledgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whole seconds since the Unix epoch, UTC.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  constexpr explicit Timestamp(std::int64_t seconds) : seconds_(seconds) {}

  /// Accepts `2014-01-28T09:30:15` (optionally with a trailing `Z`) and the
  /// legacy `t2014.01.28.09.30.15`. Throws KnowledgeError otherwise.
  static Timestamp parse(std::string_view text);

  std::int64_t seconds() const { return seconds_; }
  /// `2014-01-28T09:30:15`.
  std::string to_iso() const;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;

 private:
  std::int64_t seconds_ = 0;
};

struct EventRecord {
  UserId user;
  NodeId node;
  Timestamp timestamp;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

class EventLog {
 public:
  /// Throws KnowledgeError when the timestamp is earlier than the user's
  /// previous event.
  void record(EventRecord e);

  const std::vector<EventRecord>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

 private:
  std::vector<EventRecord> events_;
  std::map<UserId, Timestamp> last_;
};

EventLog record_event(EventLog log, EventRecord e);

/// CSV with a `user,node,timestamp` header. Node ids are normalised and
/// timestamps may use either accepted form. Errors name the line.
EventLog load_events(std::string_view csv);
std::string save_events(const EventLog& log);

struct Trip {
  UserId user;
  NodeId entry_gate;
  /// Last parking place visited.
  std::optional<NodeId> parked_spot;
  std::optional<NodeId> exit_gate;
  std::vector<EventRecord> events;

  friend bool operator==(const Trip&, const Trip&) = default;
};

/// Cuts each user's events into gate-to-gate trips. Throws KnowledgeError on
/// unknown nodes or an event outside a trip. Trips still open at the end of
/// the log are dropped.
std::vector<Trip> reconstruct_trips(const EventLog& log, const world::WorldGraph& graph);

/// `gate -> F spot` for a parked trip, nothing for a pass-through.
std::vector<ltl::Formula> mine_trip(const Trip& trip);

struct SpecTriple {
  UserId user;
  ltl::Formula formula;
  std::int64_t r = 1;

  friend bool operator==(const SpecTriple&, const SpecTriple&) = default;
};

class SpecStore {
 public:
  /// Bumps r of an existing (user, formula) pair or inserts it with r = 1.
  void upsert(const UserId& user, const ltl::Formula& f);
  /// Sets r directly; r must be positive.
  void set(const UserId& user, const ltl::Formula& f, std::int64_t r);
  bool remove(const UserId& user, const ltl::Formula& f);

  std::optional<std::int64_t> find(const UserId& user, const ltl::Formula& f) const;
  bool contains(const UserId& user, const ltl::Formula& f) const { return find(user, f).has_value(); }

  /// By user, then r descending, then formula text.
  std::vector<SpecTriple> triples() const;
  std::vector<SpecTriple> triples_for(const UserId& user) const;
  std::size_t size() const;
  bool empty() const { return by_user_.empty(); }

  friend bool operator==(const SpecStore&, const SpecStore&) = default;

 private:
  std::map<UserId, std::map<ltl::Formula, std::int64_t>> by_user_;
};

SpecStore upsert(SpecStore store, const UserId& user, const ltl::Formula& f);

inline constexpr std::size_t kDefaultNeverGateThreshold = 3;

/// Once the user has at least `threshold` trips, asserts `G !gate` (r = 1)
/// for every gate of the graph that none of those trips used.
SpecStore infer_never_gates(SpecStore store, const UserId& user, const std::vector<Trip>& trips,
                            const world::WorldGraph& graph, std::size_t threshold = kDefaultNeverGateThreshold);

/// Mines every trip and then applies infer_never_gates per user.
SpecStore mine_store(const std::vector<Trip>& trips, const world::WorldGraph& graph,
                     std::size_t threshold = kDefaultNeverGateThreshold);

/// One `user<TAB>formula<TAB>r` line per triple, in triples() order.
std::string save_store(const SpecStore& store);
SpecStore load_store(std::string_view tsv);

/// Stored formulas of the user sharing an atom with the observation, ordered
/// by r descending, then formula text.
std::vector<SpecTriple> relevant_triples(const SpecStore& store, const UserId& user,
                                         const ltl::Formula& observation);

/// The formula checked when the observation arrives: invariants (G-rooted)
/// first, then the observation, then the remaining relevant formulas, all
/// conjoined left to right.
ltl::Formula spec_formula(const SpecStore& store, const UserId& user, const ltl::Formula& observation);

struct Resolution {
  SpecStore store;
  std::vector<ltl::Formula> removed;
  /// Set when no single formula explains the conflict.
  std::optional<std::string> warning;
};

/// Removes every stored formula of the user that is unsatisfiable together
/// with the observation. Throws KnowledgeError when the specification is
/// satisfiable to begin with.
Resolution resolve_contradiction(const SpecStore& store, const UserId& user, const ltl::Formula& observation);

}  // namespace ctxpref::knowledge
