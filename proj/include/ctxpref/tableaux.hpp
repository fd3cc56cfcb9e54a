#pragma once

// Labelled semantic tableaux for the F/G fragment of linear temporal logic.
//
// Formulas live at worlds (time points). The root world is written `1`;
// an eventuality F f at world w puts f at a named world `w.[a]` that lies at
// or after w; an invariant G f at w becomes `w.[x]: f` with a universal
// label ranging over every world from w on. Literals under a universal label
// close against any complementary literal at a world not earlier than the
// label's anchor.
//
// Time is read as a finite path whose last state repeats forever, with F and
// G both including the current position. Each distinct eventuality gets a
// single witness world per branch, so worlds on a branch number at most one
// more than the eventualities, and the order of witnesses is chosen by
// branching.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxpref/ltl.hpp"

namespace ctxpref::tableaux {

struct WorldLabel {
  enum class Kind { Root, Named, Universal };

  Kind kind = Kind::Root;
  /// Named steps leading to the world this label is attached to, outermost
  /// first. `1.[a].[b]` has prefix {"a"} and name "b".
  std::vector<std::string> prefix;
  /// Step name (Named) or variable (Universal); empty for the root.
  std::string name;

  static WorldLabel root() { return {}; }
  WorldLabel named_child(std::string step) const;
  WorldLabel universal_child(std::string variable) const;
  /// The world a universal label ranges from; identity for concrete labels.
  WorldLabel anchor() const;
  bool is_universal() const { return kind == Kind::Universal; }

  std::string to_string() const;

  friend auto operator<=>(const WorldLabel&, const WorldLabel&) = default;
};

/// Whether two labels can denote the same world, given the temporal order of
/// the concrete worlds on the branch.
bool labels_unify(const WorldLabel& a, const WorldLabel& b, std::span<const WorldLabel> order);

struct LabeledLiteral {
  bool positive = true;
  std::string atom;
  WorldLabel label;

  /// `g3`, `!g3`, `1.[x]: !g3`.
  std::string to_string() const;

  friend auto operator<=>(const LabeledLiteral&, const LabeledLiteral&) = default;
};

enum class BranchStatus { Open, Closed };

enum class Closure {
  None,
  /// Complementary literals under unifiable labels.
  Clash,
  /// An eventuality is required after its only witness world.
  Order,
};

struct Branch {
  std::vector<LabeledLiteral> literals;
  /// Concrete worlds in temporal order, root first.
  std::vector<WorldLabel> worlds;
  BranchStatus status = BranchStatus::Open;
  Closure closure = Closure::None;
  /// Leaf node in TruthTree::nodes.
  std::size_t leaf = 0;

  bool is_open() const { return status == BranchStatus::Open; }
};

struct TreeNode {
  std::string text;
  /// Placement note when an eventuality had several admissible witnesses.
  std::string note;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
  /// Set on leaves only.
  std::optional<BranchStatus> mark;
};

struct TruthTree {
  ltl::Formula root;
  /// nodes[0] is the root.
  std::vector<TreeNode> nodes;
  /// Leaf branches, left to right.
  std::vector<Branch> branches;

  bool is_open() const;
  std::size_t open_branches() const;
};

struct Options {
  /// Only try "new world after everything" for an eventuality when no later
  /// world carries temporal obligations; the other placements cannot succeed
  /// where that one fails.
  bool prune_dominated_placements = true;
};

/// Builds the finished tree. Pure; equal formulas give identical trees.
TruthTree build_tree(const ltl::Formula& f, const Options& options = {});

enum class Satisfiability { Satisfiable, Unsatisfiable };
enum class Validity { Valid, NotValid };

Satisfiability is_satisfiable(const ltl::Formula& f);
/// Valid iff the tree for the negation closes.
Validity is_valid(const ltl::Formula& f);

std::string_view to_string(Satisfiability v);
std::string_view to_string(Validity v);

struct Consequence {
  /// 1-based index into TruthTree::branches.
  std::size_t branch = 0;
  /// Positive atoms sitting at named (eventuality) worlds.
  std::set<std::string> atoms;

  friend bool operator==(const Consequence&, const Consequence&) = default;
};

/// One entry per open branch, in branch order.
std::vector<Consequence> open_consequences(const TruthTree& tree);

enum class ExportFormat { Ascii, Dot };

/// Throws std::invalid_argument for anything but "ascii" or "dot".
ExportFormat parse_export_format(std::string_view name);

std::string export_tree(const TruthTree& tree, ExportFormat format);

}  // namespace ctxpref::tableaux
