#include "ctxpref/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <map>
#include <random>
#include <sstream>

namespace ctxpref::sim {

using world::NodeKind;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ScenarioError("bad value for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ScenarioError("bad value for " + std::string(key));
}

// Shortest hop path along non-`at` edges; inner nodes are roads only.
std::vector<NodeId> shortest_path(const WorldGraph& g, const NodeId& from, const NodeId& to) {
  std::map<NodeId, NodeId> parent{{from, from}};
  std::deque<NodeId> queue{from};
  while (!queue.empty() && !parent.contains(to)) {
    const NodeId current = queue.front();
    queue.pop_front();
    for (const auto& e : g.out_edges(current)) {
      if (e.label == world::kAtLabel || parent.contains(e.to)) continue;
      if (e.to != to && g.kind(e.to) != NodeKind::Road) continue;
      parent.emplace(e.to, current);
      queue.push_back(e.to);
    }
  }
  if (!parent.contains(to)) throw ScenarioError("no route from " + from + " to " + to);
  std::vector<NodeId> path{to};
  while (path.back() != from) path.push_back(parent.at(path.back()));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

// -- scenario files -------------------------------------------------------------------

Scenario load_scenario(std::string_view text) {
  enum class Section { Graph, Config, Timeline } section = Section::Graph;
  std::string graph_text;
  Scenario s;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::size_t> entry_lines;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line == "config:") {
      section = Section::Config;
      continue;
    }
    if (line == "timeline:") {
      section = Section::Timeline;
      continue;
    }
    if (section == Section::Graph) {
      // Keep line numbers aligned with the scenario file.
      graph_text.append(raw).push_back('\n');
      continue;
    }
    graph_text.push_back('\n');
    if (line.empty()) continue;
    try {
      if (section == Section::Config) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ScenarioError("expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "fallback_nearest") {
          s.config.fallback_nearest = parse_bool(value, key);
        } else if (key == "never_gate_threshold") {
          s.config.never_gate_threshold = parse_number<std::size_t>(value, key);
        } else if (key == "seed") {
          s.config.rng_seed = parse_number<std::uint64_t>(value, key);
        } else {
          throw ScenarioError("unknown setting '" + std::string(key) + "'");
        }
      } else {
        std::vector<std::string_view> f;
        std::size_t start = 0;
        while (true) {
          const auto comma = line.find(',', start);
          f.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
        if (f.size() != 3) throw ScenarioError("expected timestamp,user,node");
        if (!ltl::is_valid_atom_name(f[1])) throw ScenarioError("bad user '" + std::string(f[1]) + "'");
        s.timeline.push_back({Timestamp::parse(f[0]), std::string(f[1]), world::normalize_node_id(f[2])});
        entry_lines.push_back(line_no);
      }
    } catch (const ScenarioError& e) {
      throw ScenarioError(line_error(line_no, e.what()));
    } catch (const knowledge::KnowledgeError& e) {
      throw ScenarioError(line_error(line_no, e.what()));
    }
  }
  try {
    s.graph = world::load_graph(graph_text);
  } catch (const world::GraphError& e) {
    throw ScenarioError(e.what());
  }
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    if (!s.graph.has_node(s.timeline[i].node)) {
      throw ScenarioError(line_error(entry_lines[i], "unknown node '" + s.timeline[i].node + "'"));
    }
  }
  std::stable_sort(s.timeline.begin(), s.timeline.end(),
                   [](const TimelineEntry& a, const TimelineEntry& b) { return a.timestamp < b.timestamp; });
  return s;
}

std::string save_scenario(const Scenario& s) {
  std::string out = world::save_graph(s.graph);
  out += "\nconfig:\n";
  out += std::string("fallback_nearest=") + (s.config.fallback_nearest ? "true" : "false") + "\n";
  out += "never_gate_threshold=" + std::to_string(s.config.never_gate_threshold) + "\n";
  out += "seed=" + std::to_string(s.config.rng_seed) + "\n";
  out += "\ntimeline:\n";
  for (const auto& e : s.timeline) out += e.timestamp.to_iso() + "," + e.user + "," + e.node + "\n";
  return out;
}

// -- running ----------------------------------------------------------------------------

SimulationReport run(const Scenario& s, const Observer& observer) {
  for (const auto& e : s.timeline) {
    if (!s.graph.has_node(e.node)) throw ScenarioError("timeline refers to unknown node '" + e.node + "'");
  }
  std::vector<TimelineEntry> timeline = s.timeline;
  std::stable_sort(timeline.begin(), timeline.end(),
                   [](const TimelineEntry& a, const TimelineEntry& b) { return a.timestamp < b.timestamp; });

  agents::AgentSystem system(s.graph, agents::SystemConfig{s.config.fallback_nearest, s.config.never_gate_threshold});
  SimulationReport report{{}, {}, s.graph, {}, s.config.rng_seed};
  std::map<UserId, std::optional<NodeId>> suggested;

  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& entry = timeline[i];
    std::vector<agents::AgentMessage> messages;
    try {
      messages = system.detect(entry.node, entry.user, entry.timestamp);
    } catch (const std::exception& e) {
      throw ScenarioError("timeline entry " + std::to_string(i + 1) + " (" + entry.timestamp.to_iso() + "," +
                          entry.user + "," + entry.node + "): " + e.what());
    }
    for (const auto& m : messages) {
      if (const auto* d = std::get_if<agents::Decision>(&m.payload())) {
        report.decisions.push_back({entry.timestamp, d->decision});
        suggested[d->decision.user] = d->decision.suggestion;
        if (!d->decision.removed.empty()) ++report.stats.contradictions_resolved;
      } else if (const auto* t = std::get_if<agents::TripReport>(&m.payload())) {
        const auto it = suggested.find(t->trip.user);
        if (it != suggested.end() && it->second && it->second == t->trip.parked_spot) {
          ++report.stats.suggestions_followed;
        }
        suggested.erase(t->trip.user);
      }
    }
    if (observer) observer(Step{i, entry, messages, system});
  }

  report.final_store = system.store();
  report.final_graph = system.graph();
  report.stats.decisions = report.decisions.size();
  report.stats.trips = system.trips().size();
  report.stats.followers_alive = system.followers_alive();
  return report;
}

std::string format_report(const SimulationReport& report) {
  std::ostringstream out;
  const auto& st = report.stats;
  out << "seed: " << report.seed << '\n';
  out << "stats: decisions=" << st.decisions << " trips=" << st.trips
      << " contradictions_resolved=" << st.contradictions_resolved
      << " suggestions_followed=" << st.suggestions_followed << " followers_alive=" << st.followers_alive
      << '\n';
  for (std::size_t i = 0; i < report.decisions.size(); ++i) {
    const auto& [at, d] = report.decisions[i];
    out << "\ndecision " << i + 1 << " at " << at.to_iso() << " user=" << d.user << " gate=" << d.gate << '\n';
    out << "formula: " << ltl::print(d.formula) << '\n';
    out << "tree: " << d.tree.open_branches() << " open of " << d.tree.branches.size() << " branches\n";
    for (const auto& f : d.removed) out << "removed: " << ltl::print(f) << '\n';
    if (d.warning) out << "warning: " << *d.warning << '\n';
    out << "candidates:";
    if (d.candidates.empty()) out << " none";
    for (const auto& c : d.candidates) out << ' ' << c.spot << " r=" << c.r;
    out << '\n' << d.summary() << '\n';
  }
  out << "\nstore:\n" << knowledge::save_store(report.final_store);
  out << "\ngraph:\n" << world::save_graph(report.final_graph);
  return out.str();
}

// -- generation ---------------------------------------------------------------------------

Scenario generate(const WorldGraph& graph, std::uint64_t seed, const GeneratorParams& params) {
  if (params.users == 0) throw ScenarioError("users must be positive");
  if (params.trips_per_user == 0) throw ScenarioError("trips_per_user must be positive");
  if (!(params.spot_affinity >= 0.0 && params.spot_affinity <= 1.0)) {
    throw ScenarioError("spot_affinity must lie in [0, 1]");
  }
  const auto gates = graph.nodes_of(NodeKind::Gate);
  const auto spots = graph.nodes_of(NodeKind::Place);
  if (gates.empty() || spots.size() < 2) throw ScenarioError("graph needs a gate and two places");

  // Plain modulo draws keep the sequence identical across standard libraries.
  std::mt19937_64 rng(seed);
  constexpr std::uint64_t kScale = 1'000'000;
  const auto threshold = static_cast<std::uint64_t>(params.spot_affinity * kScale + 0.5);

  struct Driver {
    UserId id;
    NodeId gate, favorite, alternative;
  };
  std::vector<Driver> drivers;
  for (std::size_t u = 0; u < params.users; ++u) {
    Driver d;
    d.id = "car" + std::to_string(u + 1);
    d.gate = gates[rng() % gates.size()];
    const std::size_t fav = rng() % spots.size();
    const std::size_t alt = (fav + 1 + rng() % (spots.size() - 1)) % spots.size();
    d.favorite = spots[fav];
    d.alternative = spots[alt];
    drivers.push_back(std::move(d));
  }

  Scenario s;
  s.graph = graph;
  s.config.rng_seed = seed;
  // Trips run one after another so every place is free on arrival.
  std::int64_t clock = Timestamp::parse("2014-01-28T08:00:00").seconds();
  for (std::size_t t = 0; t < params.trips_per_user; ++t) {
    for (const auto& d : drivers) {
      const bool loyal = rng() % kScale < threshold;
      const NodeId& spot = loyal ? d.favorite : d.alternative;
      auto there = shortest_path(graph, d.gate, spot);
      auto back = shortest_path(graph, spot, d.gate);
      there.insert(there.end(), back.begin() + 1, back.end());
      for (const auto& node : there) {
        s.timeline.push_back({Timestamp{clock}, d.id, node});
        clock += 60;
      }
      clock += 3600;
    }
  }
  return s;
}

}  // namespace ctxpref::sim
