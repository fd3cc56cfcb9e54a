#include "ctxpref/world_graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <span>
#include <sstream>

#include "ctxpref/ltl.hpp"

namespace ctxpref::world {

namespace {

bool valid_token(std::string_view s, bool allow_eq) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [&](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '#' || (!allow_eq && c == '=') ||
           c == '"';
  });
}

void check_attributes(const Attributes& attributes) {
  for (const auto& [key, value] : attributes) {
    if (!valid_token(key, false)) throw GraphError("bad attribute name '" + key + "'");
    if (value && !valid_token(*value, true)) throw GraphError("bad value for attribute '" + key + "'");
  }
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

Attributes parse_attributes(std::span<const std::string_view> items) {
  Attributes attributes;
  for (std::string_view item : items) {
    const auto eq = item.find('=');
    std::string key(item.substr(0, eq));
    std::optional<std::string> value;
    if (eq != std::string_view::npos) value = std::string(item.substr(eq + 1));
    if (attributes.contains(key)) throw GraphError("duplicate attribute '" + key + "'");
    attributes.emplace(std::move(key), std::move(value));
  }
  check_attributes(attributes);
  return attributes;
}

void write_attributes(std::ostream& out, const Attributes& attributes) {
  for (const auto& [key, value] : attributes) {
    out << ' ' << key;
    if (value) out << '=' << *value;
  }
}

std::string dot_attributes(const Attributes& attributes) {
  std::string s;
  for (const auto& [key, value] : attributes) {
    s += "\\n" + key;
    if (value) s += "=" + *value;
  }
  return s;
}

}  // namespace

char to_letter(NodeKind kind) {
  switch (kind) {
    case NodeKind::Gate: return 'G';
    case NodeKind::Road: return 'R';
    case NodeKind::Place: return 'P';
    case NodeKind::Car: return 'C';
  }
  return '?';
}

std::optional<NodeKind> kind_from_letter(std::string_view letter) {
  if (letter == "G") return NodeKind::Gate;
  if (letter == "R") return NodeKind::Road;
  if (letter == "P") return NodeKind::Place;
  if (letter == "C") return NodeKind::Car;
  return std::nullopt;
}

NodeId normalize_node_id(std::string_view id) {
  std::size_t digits = id.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(id[digits - 1]))) --digits;
  std::string out(id.substr(0, digits));
  std::string_view run = id.substr(digits);
  while (run.size() > 3 && run.front() == '0') run.remove_prefix(1);
  out += run;
  return out;
}

// -- WorldGraph ---------------------------------------------------------------

void WorldGraph::add_node(const NodeId& id, NodeKind kind, Attributes attributes) {
  if (!ltl::is_valid_atom_name(id)) throw GraphError("bad node id '" + id + "'");
  if (nodes_.contains(id)) throw GraphError("duplicate node '" + id + "'");
  check_attributes(attributes);
  nodes_.emplace(id, Node{kind, std::move(attributes)});
}

void WorldGraph::add_edge(const NodeId& from, const NodeId& to, std::string label, Attributes attributes) {
  if (!nodes_.contains(from)) throw GraphError("edge from unknown node '" + from + "'");
  if (!nodes_.contains(to)) throw GraphError("edge to unknown node '" + to + "'");
  if (!valid_token(label, false)) throw GraphError("bad edge label '" + label + "'");
  if (has_edge(from, to)) throw GraphError("duplicate edge " + from + " -> " + to);
  check_attributes(attributes);
  out_[from].emplace(to, Edge{from, to, std::move(label), std::move(attributes)});
  in_[to].insert(from);
}

void WorldGraph::remove_edge(const NodeId& from, const NodeId& to) {
  auto it = out_.find(from);
  if (it == out_.end() || !it->second.erase(to)) throw GraphError("no edge " + from + " -> " + to);
  if (it->second.empty()) out_.erase(it);
  auto in = in_.find(to);
  in->second.erase(from);
  if (in->second.empty()) in_.erase(in);
}

void WorldGraph::remove_node(const NodeId& id) {
  if (!nodes_.erase(id)) throw GraphError("unknown node '" + id + "'");
  if (auto it = out_.find(id); it != out_.end()) {
    for (const auto& [to, edge] : it->second) {
      auto in = in_.find(to);
      in->second.erase(id);
      if (in->second.empty()) in_.erase(in);
    }
    out_.erase(it);
  }
  if (auto it = in_.find(id); it != in_.end()) {
    for (const auto& from : it->second) {
      auto out = out_.find(from);
      out->second.erase(id);
      if (out->second.empty()) out_.erase(out);
    }
    in_.erase(it);
  }
}

bool WorldGraph::has_edge(const NodeId& from, const NodeId& to) const {
  auto it = out_.find(from);
  return it != out_.end() && it->second.contains(to);
}

NodeKind WorldGraph::kind(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GraphError("unknown node '" + id + "'");
  return it->second.kind;
}

const Attributes& WorldGraph::attributes(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw GraphError("unknown node '" + id + "'");
  return it->second.attributes;
}

const Edge& WorldGraph::edge(const NodeId& from, const NodeId& to) const {
  auto it = out_.find(from);
  if (it != out_.end()) {
    if (auto e = it->second.find(to); e != it->second.end()) return e->second;
  }
  throw GraphError("no edge " + from + " -> " + to);
}

std::size_t WorldGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [from, targets] : out_) n += targets.size();
  return n;
}

std::vector<NodeId> WorldGraph::nodes_of(NodeKind kind) const {
  std::vector<NodeId> ids;
  for (const auto& [id, node] : nodes_) {
    if (node.kind == kind) ids.push_back(id);
  }
  return ids;
}

std::vector<Edge> WorldGraph::edges() const {
  std::vector<Edge> all;
  for (const auto& [from, targets] : out_) {
    for (const auto& [to, edge] : targets) all.push_back(edge);
  }
  return all;
}

std::vector<Edge> WorldGraph::out_edges(const NodeId& id) const {
  if (!nodes_.contains(id)) throw GraphError("unknown node '" + id + "'");
  std::vector<Edge> result;
  if (auto it = out_.find(id); it != out_.end()) {
    for (const auto& [to, edge] : it->second) result.push_back(edge);
  }
  return result;
}

const std::set<NodeId>& WorldGraph::predecessors(const NodeId& id) const {
  static const std::set<NodeId> none;
  if (!nodes_.contains(id)) throw GraphError("unknown node '" + id + "'");
  auto it = in_.find(id);
  return it == in_.end() ? none : it->second;
}

// -- text formats -------------------------------------------------------------

WorldGraph load_graph(std::string_view text) {
  WorldGraph g;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto f = fields(line);
    if (f.empty()) continue;
    try {
      if (f.size() >= 3 && f[1] == "->") {
        if (f.size() < 4) throw GraphError("edge needs a label");
        g.add_edge(normalize_node_id(f[0]), normalize_node_id(f[2]), std::string(f[3]),
                   parse_attributes(std::span(f).subspan(4)));
      } else {
        if (f.size() < 2) throw GraphError("node needs a label");
        const auto kind = kind_from_letter(f[1]);
        if (!kind) throw GraphError("unknown label '" + std::string(f[1]) + "'");
        g.add_node(normalize_node_id(f[0]), *kind, parse_attributes(std::span(f).subspan(2)));
      }
    } catch (const GraphError& e) {
      throw GraphError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return g;
}

std::string save_graph(const WorldGraph& g) {
  std::ostringstream out;
  for (const auto& [id, node] : g.nodes()) {
    out << id << ' ' << to_letter(node.kind);
    write_attributes(out, node.attributes);
    out << '\n';
  }
  for (const auto& e : g.edges()) {
    out << e.from << " -> " << e.to << ' ' << e.label;
    write_attributes(out, e.attributes);
    out << '\n';
  }
  return out.str();
}

std::string to_dot(const WorldGraph& g) {
  std::ostringstream out;
  out << "digraph world {\n";
  for (const auto& [id, node] : g.nodes()) {
    const char* shape = "ellipse";
    switch (node.kind) {
      case NodeKind::Gate: shape = "house"; break;
      case NodeKind::Road: shape = "ellipse"; break;
      case NodeKind::Place: shape = "box"; break;
      case NodeKind::Car: shape = "diamond"; break;
    }
    out << "  \"" << id << "\" [label=\"" << id << " (" << to_letter(node.kind) << ')'
        << dot_attributes(node.attributes) << "\", shape=" << shape << "];\n";
  }
  for (const auto& e : g.edges()) {
    out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << e.label << dot_attributes(e.attributes)
        << '"';
    if (e.label == kAtLabel) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

// -- parking transformations ----------------------------------------------------

std::optional<NodeId> car_position(const WorldGraph& g, const NodeId& car) {
  if (!g.has_node(car) || g.kind(car) != NodeKind::Car) return std::nullopt;
  for (const auto& e : g.out_edges(car)) {
    if (e.label == kAtLabel) return e.to;
  }
  return std::nullopt;
}

std::optional<NodeId> occupant(const WorldGraph& g, const NodeId& spot) {
  for (const auto& from : g.predecessors(spot)) {
    if (g.kind(from) == NodeKind::Car && g.edge(from, spot).label == kAtLabel) return from;
  }
  return std::nullopt;
}

bool is_free(const WorldGraph& g, const NodeId& spot) {
  if (!g.has_node(spot)) throw GraphError("unknown node '" + spot + "'");
  if (g.kind(spot) != NodeKind::Place) throw GraphError("'" + spot + "' is not a parking place");
  return !occupant(g, spot);
}

WorldGraph car_enters(const WorldGraph& g, const NodeId& car, const NodeId& gate) {
  if (!g.has_node(gate)) throw GraphError("unknown gate '" + gate + "'");
  if (g.kind(gate) != NodeKind::Gate) throw GraphError("'" + gate + "' is not a gate");
  if (g.has_node(car)) throw GraphError("car '" + car + "' is already present");
  WorldGraph next = g;
  next.add_node(car, NodeKind::Car);
  next.add_edge(car, gate, std::string(kAtLabel));
  return next;
}

WorldGraph car_moves(const WorldGraph& g, const NodeId& car, const NodeId& node) {
  const auto here = car_position(g, car);
  if (!here) throw GraphError("car '" + car + "' is not present");
  if (!g.has_node(node)) throw GraphError("unknown node '" + node + "'");
  if (g.kind(node) == NodeKind::Car) throw GraphError("cannot move onto car '" + node + "'");
  if (*here == node) return g;
  if (g.kind(node) == NodeKind::Place && !is_free(g, node)) {
    throw GraphError("place '" + node + "' is occupied");
  }
  WorldGraph next = g;
  next.remove_edge(car, *here);
  next.add_edge(car, node, std::string(kAtLabel));
  return next;
}

WorldGraph car_exits(const WorldGraph& g, const NodeId& car) {
  if (!car_position(g, car)) throw GraphError("car '" + car + "' is not present");
  WorldGraph next = g;
  next.remove_node(car);
  return next;
}

std::map<NodeId, std::size_t> hop_distances(const WorldGraph& g, const NodeId& from) {
  if (!g.has_node(from)) throw GraphError("unknown node '" + from + "'");
  std::map<NodeId, std::size_t> dist{{from, 0}};
  std::deque<NodeId> queue{from};
  while (!queue.empty()) {
    const NodeId current = queue.front();
    queue.pop_front();
    for (const auto& e : g.out_edges(current)) {
      if (e.label == kAtLabel || g.kind(e.to) == NodeKind::Car || dist.contains(e.to)) continue;
      dist.emplace(e.to, dist.at(current) + 1);
      queue.push_back(e.to);
    }
  }
  return dist;
}

std::optional<NodeId> nearest_free_spot(const WorldGraph& g, const NodeId& from) {
  std::optional<NodeId> best;
  std::size_t best_distance = 0;
  for (const auto& [id, d] : hop_distances(g, from)) {
    if (g.kind(id) != NodeKind::Place || !is_free(g, id)) continue;
    // Map iteration is by id, so the first hit at a distance is the smallest.
    if (!best || d < best_distance) {
      best = id;
      best_distance = d;
    }
  }
  return best;
}

// -- split / glue ------------------------------------------------------------------

GraphPartition split(const WorldGraph& g, std::size_t k) {
  const std::size_t n = g.node_count();
  if (k == 0 || k > n) {
    throw GraphError("cannot split " + std::to_string(n) + " nodes into " + std::to_string(k) + " parts");
  }
  std::vector<NodeId> ids;
  for (const auto& [id, node] : g.nodes()) ids.push_back(id);

  std::map<NodeId, std::set<NodeId>> undirected;
  for (const auto& e : g.edges()) {
    undirected[e.from].insert(e.to);
    undirected[e.to].insert(e.from);
  }

  GraphPartition p;
  std::vector<std::deque<NodeId>> frontier(k);
  std::vector<std::size_t> sizes(k, 0);
  auto claim = [&](const NodeId& id, std::size_t part) {
    p.owner.emplace(id, part);
    ++sizes[part];
    frontier[part].push_back(id);
  };
  for (std::size_t i = 0; i < k; ++i) claim(ids[i * n / k], i);

  std::size_t next_unclaimed = 0;
  while (p.owner.size() < n) {
    bool grew = false;
    for (std::size_t part = 0; part < k; ++part) {
      // One claim per part per round keeps the regions balanced.
      while (!frontier[part].empty()) {
        const NodeId current = frontier[part].front();
        std::optional<NodeId> pick;
        for (const auto& other : undirected[current]) {
          if (!p.owner.contains(other)) {
            pick = other;
            break;
          }
        }
        if (!pick) {
          frontier[part].pop_front();
          continue;
        }
        claim(*pick, part);
        grew = true;
        break;
      }
    }
    if (grew) continue;
    // Disconnected remainder: seed the smallest part with the next free id.
    while (p.owner.contains(ids[next_unclaimed])) ++next_unclaimed;
    const auto smallest = std::min_element(sizes.begin(), sizes.end()) - sizes.begin();
    claim(ids[next_unclaimed], static_cast<std::size_t>(smallest));
  }

  p.parts.resize(k);
  for (const auto& [id, part] : p.owner) {
    p.parts[part].add_node(id, g.kind(id), g.attributes(id));
  }
  for (const auto& e : g.edges()) {
    WorldGraph& part = p.parts[p.owner.at(e.from)];
    if (!part.has_node(e.to)) part.add_node(e.to, g.kind(e.to), g.attributes(e.to));
    part.add_edge(e.from, e.to, e.label, e.attributes);
  }
  std::map<NodeId, std::size_t> copies;
  for (const auto& part : p.parts) {
    for (const auto& [id, node] : part.nodes()) ++copies[id];
  }
  for (const auto& [id, count] : copies) {
    if (count >= 2) p.border_nodes.insert(id);
  }
  return p;
}

WorldGraph glue(const GraphPartition& p) {
  if (p.parts.empty()) throw GraphError("cannot glue an empty partition");
  WorldGraph g;
  for (const auto& part : p.parts) {
    for (const auto& [id, node] : part.nodes()) {
      if (!g.has_node(id)) {
        g.add_node(id, node.kind, node.attributes);
      } else if (g.kind(id) != node.kind || g.attributes(id) != node.attributes) {
        throw GraphError("replicas of '" + id + "' disagree");
      }
    }
  }
  for (const auto& part : p.parts) {
    for (const auto& e : part.edges()) {
      if (!g.has_edge(e.from, e.to)) {
        g.add_edge(e.from, e.to, e.label, e.attributes);
      } else if (g.edge(e.from, e.to) != e) {
        throw GraphError("replicas of edge " + e.from + " -> " + e.to + " disagree");
      }
    }
  }
  return g;
}

std::optional<std::string> check_invariants(const WorldGraph& g) {
  for (const auto& car : g.nodes_of(NodeKind::Car)) {
    const auto out = g.out_edges(car);
    std::size_t at = 0;
    for (const auto& e : out) {
      if (e.label != kAtLabel) return "car " + car + " has a non-at edge to " + e.to;
      if (g.kind(e.to) == NodeKind::Car) return "car " + car + " is at another car";
      ++at;
    }
    if (at != 1) return "car " + car + " has " + std::to_string(at) + " at-edges";
  }
  for (const auto& spot : g.nodes_of(NodeKind::Place)) {
    std::size_t cars = 0;
    for (const auto& from : g.predecessors(spot)) {
      if (g.kind(from) == NodeKind::Car) ++cars;
    }
    if (cars > 1) return "place " + spot + " holds " + std::to_string(cars) + " cars";
  }
  return std::nullopt;
}

}  // namespace ctxpref::world
