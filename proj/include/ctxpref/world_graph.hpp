#pragma once

// Labelled, attributed digraph of a parking space.
//
// Nodes are gates (G), road segments (R), parking places (P) and cars (C).
// A car sits wherever its single `at` edge points; occupancy of a place is
// read off those edges and nothing else.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctxpref::world {

using NodeId = std::string;

enum class NodeKind { Gate, Road, Place, Car };

/// "G", "R", "P", "C".
char to_letter(NodeKind kind);
std::optional<NodeKind> kind_from_letter(std::string_view letter);

/// Attribute name to optional value; a name without a value is declared but
/// not instantiated.
using Attributes = std::map<std::string, std::optional<std::string>>;

inline constexpr std::string_view kAtLabel = "at";
inline constexpr std::string_view kRoadLabel = "road";

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strips leading zeros from the trailing digit run while it is longer than
/// three digits, so `p0018` and `p018` name the same place.
NodeId normalize_node_id(std::string_view id);

struct Edge {
  NodeId from;
  NodeId to;
  std::string label;
  Attributes attributes;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class WorldGraph {
 public:
  struct Node {
    NodeKind kind;
    Attributes attributes;
    friend bool operator==(const Node&, const Node&) = default;
  };

  /// Throws GraphError on a duplicate or malformed id.
  void add_node(const NodeId& id, NodeKind kind, Attributes attributes = {});
  /// Throws GraphError on a missing endpoint or an existing (from, to) edge.
  void add_edge(const NodeId& from, const NodeId& to, std::string label, Attributes attributes = {});
  /// Removes the node and every edge touching it.
  void remove_node(const NodeId& id);
  void remove_edge(const NodeId& from, const NodeId& to);

  bool has_node(const NodeId& id) const { return nodes_.contains(id); }
  bool has_edge(const NodeId& from, const NodeId& to) const;
  /// Throws GraphError when absent.
  NodeKind kind(const NodeId& id) const;
  const Attributes& attributes(const NodeId& id) const;
  const Edge& edge(const NodeId& from, const NodeId& to) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const;

  /// Sorted by id.
  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  std::vector<NodeId> nodes_of(NodeKind kind) const;
  /// Sorted by (from, to).
  std::vector<Edge> edges() const;
  /// Out-edges of a node, sorted by target.
  std::vector<Edge> out_edges(const NodeId& id) const;
  /// Sources of edges into a node, sorted.
  const std::set<NodeId>& predecessors(const NodeId& id) const;

  friend bool operator==(const WorldGraph&, const WorldGraph&) = default;

 private:
  std::map<NodeId, Node> nodes_;
  std::map<NodeId, std::map<NodeId, Edge>> out_;
  std::map<NodeId, std::set<NodeId>> in_;
};

// Text format, one record per line, `#` starts a comment:
//   <id> <label> [key[=value] ...]
//   <src> -> <dst> <label> [key[=value] ...]
WorldGraph load_graph(std::string_view text);
/// Nodes sorted by id, then edges sorted by (src, dst).
std::string save_graph(const WorldGraph& g);
std::string to_dot(const WorldGraph& g);

// Parking transformations. Each returns the transformed copy and throws
// GraphError when its precondition fails.
WorldGraph car_enters(const WorldGraph& g, const NodeId& car, const NodeId& gate);
WorldGraph car_moves(const WorldGraph& g, const NodeId& car, const NodeId& node);
WorldGraph car_exits(const WorldGraph& g, const NodeId& car);

/// Where the car currently is; nullopt when it is not in the graph.
std::optional<NodeId> car_position(const WorldGraph& g, const NodeId& car);
/// The car parked at a place, if any.
std::optional<NodeId> occupant(const WorldGraph& g, const NodeId& spot);
/// Throws GraphError unless spot is a P node.
bool is_free(const WorldGraph& g, const NodeId& spot);

/// Free place with the fewest hops from `from` along non-`at` edges, ties to
/// the smallest id. Throws GraphError when `from` is missing.
std::optional<NodeId> nearest_free_spot(const WorldGraph& g, const NodeId& from);

/// Hop distances from `from` along non-`at` edges, not passing through cars.
std::map<NodeId, std::size_t> hop_distances(const WorldGraph& g, const NodeId& from);

struct GraphPartition {
  std::vector<WorldGraph> parts;
  /// Nodes present in two or more parts.
  std::set<NodeId> border_nodes;
  /// Part index that owns each node.
  std::map<NodeId, std::size_t> owner;
};

/// Grows k regions breadth-first from evenly spaced seeds. Every edge goes to
/// the part owning its source, which also receives a replica of the target.
/// Throws GraphError unless 1 <= k <= node count.
GraphPartition split(const WorldGraph& g, std::size_t k);
/// Union of all parts. Throws GraphError on an empty partition or when two
/// replicas of a node or edge disagree.
WorldGraph glue(const GraphPartition& p);

/// Checks the car invariants: one `at` edge per car into a G, R or P node,
/// at most one car per place. Returns a description of the first violation.
std::optional<std::string> check_invariants(const WorldGraph& g);

}  // namespace ctxpref::world
