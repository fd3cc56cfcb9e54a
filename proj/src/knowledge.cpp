#include "ctxpref/knowledge.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

#include "ctxpref/tableaux.hpp"

namespace ctxpref::knowledge {

namespace chr = std::chrono;
using world::NodeKind;

namespace {

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find(sep, start);
    parts.push_back(text.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<int> number(std::string_view s, std::size_t digits) {
  if (s.size() != digits) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  for (std::string_view line : split_on(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (!line.empty()) fn(line_no, line);
  }
}

std::string text_of(const ltl::Formula& f) { return ltl::print(f); }

bool by_rank(const SpecTriple& a, const SpecTriple& b) {
  if (a.r != b.r) return a.r > b.r;
  return text_of(a.formula) < text_of(b.formula);
}

}  // namespace

// -- Timestamp -------------------------------------------------------------------

Timestamp Timestamp::parse(std::string_view text) {
  const std::string original(text);
  auto fail = [&]() -> Timestamp { throw KnowledgeError("bad timestamp '" + original + "'"); };

  std::vector<std::string_view> parts;
  if (!text.empty() && text.front() == 't') {
    parts = split_on(text.substr(1), '.');
  } else {
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    const auto t = text.find('T');
    if (t == std::string_view::npos) return fail();
    parts = split_on(text.substr(0, t), '-');
    for (auto p : split_on(text.substr(t + 1), ':')) parts.push_back(p);
  }
  if (parts.size() != 6) return fail();
  const auto y = number(parts[0], 4);
  const auto mo = number(parts[1], 2);
  const auto d = number(parts[2], 2);
  const auto h = number(parts[3], 2);
  const auto mi = number(parts[4], 2);
  const auto s = number(parts[5], 2);
  if (!y || !mo || !d || !h || !mi || !s || *h > 23 || *mi > 59 || *s > 59) return fail();
  const chr::year_month_day date{chr::year{*y}, chr::month{static_cast<unsigned>(*mo)},
                                 chr::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return fail();
  const auto when = chr::sys_days{date} + chr::hours{*h} + chr::minutes{*mi} + chr::seconds{*s};
  return Timestamp{when.time_since_epoch().count()};
}

std::string Timestamp::to_iso() const {
  const chr::sys_seconds when{chr::seconds{seconds_}};
  const auto day = chr::floor<chr::days>(when);
  const chr::year_month_day date{day};
  const chr::hh_mm_ss time{when - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                static_cast<int>(time.hours().count()), static_cast<int>(time.minutes().count()),
                static_cast<int>(time.seconds().count()));
  return buf;
}

// -- events ------------------------------------------------------------------------

void EventLog::record(EventRecord e) {
  if (auto it = last_.find(e.user); it != last_.end() && e.timestamp < it->second) {
    throw KnowledgeError("event for " + e.user + " at " + e.timestamp.to_iso() + " is earlier than " +
                         it->second.to_iso());
  }
  last_[e.user] = e.timestamp;
  events_.push_back(std::move(e));
}

EventLog record_event(EventLog log, EventRecord e) {
  log.record(std::move(e));
  return log;
}

EventLog load_events(std::string_view csv) {
  EventLog log;
  bool first = true;
  for_each_line(csv, [&](std::size_t line_no, std::string_view line) {
    const bool header = first && line == "user,node,timestamp";
    first = false;
    if (header) return;
    try {
      const auto f = split_on(line, ',');
      if (f.size() != 3) throw KnowledgeError("expected user,node,timestamp");
      const std::string user(trim(f[0]));
      const std::string node = world::normalize_node_id(trim(f[1]));
      if (user.empty()) throw KnowledgeError("empty user");
      if (!ltl::is_valid_atom_name(node)) throw KnowledgeError("bad node id '" + node + "'");
      log.record(EventRecord{user, node, Timestamp::parse(trim(f[2]))});
    } catch (const KnowledgeError& e) {
      throw KnowledgeError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return log;
}

std::string save_events(const EventLog& log) {
  std::string out = "user,node,timestamp\n";
  for (const auto& e : log.events()) out += e.user + "," + e.node + "," + e.timestamp.to_iso() + "\n";
  return out;
}

// -- trips -------------------------------------------------------------------------

std::vector<Trip> reconstruct_trips(const EventLog& log, const world::WorldGraph& graph) {
  std::map<UserId, Trip> open;
  std::vector<Trip> done;
  for (const auto& e : log.events()) {
    if (!graph.has_node(e.node)) throw KnowledgeError("unknown node '" + e.node + "'");
    const NodeKind kind = graph.kind(e.node);
    auto it = open.find(e.user);
    if (it == open.end()) {
      if (kind != NodeKind::Gate) {
        throw KnowledgeError(e.user + " seen at " + e.node + " before entering through a gate");
      }
      open.emplace(e.user, Trip{e.user, e.node, std::nullopt, std::nullopt, {e}});
      continue;
    }
    Trip& trip = it->second;
    trip.events.push_back(e);
    if (kind == NodeKind::Place) trip.parked_spot = e.node;
    if (kind == NodeKind::Gate) {
      trip.exit_gate = e.node;
      done.push_back(std::move(trip));
      open.erase(it);
    }
  }
  return done;
}

std::vector<ltl::Formula> mine_trip(const Trip& trip) {
  if (trip.entry_gate.empty()) throw KnowledgeError("trip of " + trip.user + " has no entry gate");
  if (!trip.parked_spot) return {};
  return {ltl::Formula::implication(ltl::Formula::atom(trip.entry_gate), ltl::Formula::eventually(ltl::Formula::atom(*trip.parked_spot)))};
}

// -- store ---------------------------------------------------------------------------

void SpecStore::upsert(const UserId& user, const ltl::Formula& f) { ++by_user_[user][f]; }

void SpecStore::set(const UserId& user, const ltl::Formula& f, std::int64_t r) {
  if (r < 1) throw KnowledgeError("r must be positive");
  by_user_[user][f] = r;
}

bool SpecStore::remove(const UserId& user, const ltl::Formula& f) {
  auto it = by_user_.find(user);
  if (it == by_user_.end() || !it->second.erase(f)) return false;
  if (it->second.empty()) by_user_.erase(it);
  return true;
}

std::optional<std::int64_t> SpecStore::find(const UserId& user, const ltl::Formula& f) const {
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return std::nullopt;
  auto entry = it->second.find(f);
  if (entry == it->second.end()) return std::nullopt;
  return entry->second;
}

std::vector<SpecTriple> SpecStore::triples_for(const UserId& user) const {
  std::vector<SpecTriple> result;
  if (auto it = by_user_.find(user); it != by_user_.end()) {
    for (const auto& [f, r] : it->second) result.push_back({user, f, r});
  }
  std::sort(result.begin(), result.end(), by_rank);
  return result;
}

std::vector<SpecTriple> SpecStore::triples() const {
  std::vector<SpecTriple> result;
  for (const auto& [user, formulas] : by_user_) {
    auto mine = triples_for(user);
    result.insert(result.end(), mine.begin(), mine.end());
  }
  return result;
}

std::size_t SpecStore::size() const {
  std::size_t n = 0;
  for (const auto& [user, formulas] : by_user_) n += formulas.size();
  return n;
}

SpecStore upsert(SpecStore store, const UserId& user, const ltl::Formula& f) {
  store.upsert(user, f);
  return store;
}

SpecStore infer_never_gates(SpecStore store, const UserId& user, const std::vector<Trip>& trips,
                            const world::WorldGraph& graph, std::size_t threshold) {
  std::size_t count = 0;
  std::set<NodeId> used;
  for (const auto& trip : trips) {
    if (trip.user != user) continue;
    ++count;
    used.insert(trip.entry_gate);
    if (trip.exit_gate) used.insert(*trip.exit_gate);
  }
  if (count < threshold) return store;
  for (const auto& gate : graph.nodes_of(NodeKind::Gate)) {
    if (used.contains(gate)) continue;
    const auto never = ltl::Formula::always(ltl::Formula::negation(ltl::Formula::atom(gate)));
    if (!store.contains(user, never)) store.set(user, never, 1);
  }
  return store;
}

SpecStore mine_store(const std::vector<Trip>& trips, const world::WorldGraph& graph, std::size_t threshold) {
  SpecStore store;
  std::set<UserId> users;
  for (const auto& trip : trips) {
    users.insert(trip.user);
    for (const auto& f : mine_trip(trip)) store.upsert(trip.user, f);
  }
  for (const auto& user : users) store = infer_never_gates(std::move(store), user, trips, graph, threshold);
  return store;
}

std::string save_store(const SpecStore& store) {
  std::string out;
  for (const auto& t : store.triples()) {
    out += t.user + "\t" + text_of(t.formula) + "\t" + std::to_string(t.r) + "\n";
  }
  return out;
}

SpecStore load_store(std::string_view tsv) {
  SpecStore store;
  for_each_line(tsv, [&](std::size_t line_no, std::string_view line) {
    try {
      const auto f = split_on(line, '\t');
      if (f.size() != 3) throw KnowledgeError("expected user<TAB>formula<TAB>r");
      std::int64_t r = 0;
      const auto rs = trim(f[2]);
      auto [ptr, ec] = std::from_chars(rs.data(), rs.data() + rs.size(), r);
      if (ec != std::errc{} || ptr != rs.data() + rs.size() || r < 1) throw KnowledgeError("bad r");
      const std::string user(trim(f[0]));
      const auto formula = ltl::parse(f[1]);
      if (store.contains(user, formula)) throw KnowledgeError("duplicate formula for " + user);
      store.set(user, formula, r);
    } catch (const ltl::ParseError& e) {
      throw KnowledgeError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const KnowledgeError& e) {
      throw KnowledgeError("line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return store;
}

// -- reasoning -----------------------------------------------------------------------

std::vector<SpecTriple> relevant_triples(const SpecStore& store, const UserId& user,
                                         const ltl::Formula& observation) {
  const auto seen = ltl::atoms(observation);
  std::vector<SpecTriple> result;
  for (auto& t : store.triples_for(user)) {
    const auto mentioned = ltl::atoms(t.formula);
    if (std::any_of(mentioned.begin(), mentioned.end(), [&](const auto& a) { return seen.contains(a); })) {
      result.push_back(std::move(t));
    }
  }
  return result;
}

ltl::Formula spec_formula(const SpecStore& store, const UserId& user, const ltl::Formula& observation) {
  std::vector<ltl::Formula> invariants, others;
  for (const auto& t : relevant_triples(store, user, observation)) {
    (t.formula.op() == ltl::Op::Always ? invariants : others).push_back(t.formula);
  }
  std::vector<ltl::Formula> parts = std::move(invariants);
  parts.push_back(observation);
  parts.insert(parts.end(), others.begin(), others.end());
  return ltl::conjoin(parts);
}

Resolution resolve_contradiction(const SpecStore& store, const UserId& user, const ltl::Formula& observation) {
  using tableaux::Satisfiability;
  if (tableaux::is_satisfiable(spec_formula(store, user, observation)) == Satisfiability::Satisfiable) {
    throw KnowledgeError("specification of " + user + " is consistent with " + ltl::print(observation));
  }
  Resolution result{store, {}, std::nullopt};
  for (const auto& t : store.triples_for(user)) {
    const auto pair = ltl::Formula::conjunction(observation, t.formula);
    if (tableaux::is_satisfiable(pair) == Satisfiability::Unsatisfiable) {
      result.store.remove(user, t.formula);
      result.removed.push_back(t.formula);
    }
  }
  if (tableaux::is_satisfiable(spec_formula(result.store, user, observation)) ==
      Satisfiability::Unsatisfiable) {
    result.warning = result.removed.empty()
                         ? "no single formula of " + user + " contradicts " + ltl::print(observation) +
                               "; the conflict is joint"
                         : "specification of " + user + " is still inconsistent with " +
                               ltl::print(observation);
  }
  return result;
}

}  // namespace ctxpref::knowledge
