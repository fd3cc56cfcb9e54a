#pragma once

// Propositional linear temporal logic restricted to the eventually (F) and
// always (G) operators.
//
// Surface syntax, tightest binding first:
//   atoms      [a-z][a-zA-Z0-9]*
//   unary      !f   F f   G f
//   and        f & g          (left associative)
//   or         f | g          (left associative)
//   implies    f -> g         (right associative)
//   iff        f <-> g        (non associative)

#include <compare>
#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctxpref::ltl {

enum class Op { Atom, Not, And, Or, Implies, Iff, Eventually, Always };

/// Immutable formula tree. Copies share structure; equality and ordering are
/// structural.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(Formula lhs, Formula rhs);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula equivalence(Formula lhs, Formula rhs);
  static Formula eventually(Formula f);
  static Formula always(Formula f);

  Op op() const { return node_->op; }
  bool is_atom() const { return node_->op == Op::Atom; }
  /// Atom or negated atom.
  bool is_literal() const;
  bool is_temporal() const { return op() == Op::Eventually || op() == Op::Always; }

  /// Atom name; empty for non-atoms.
  const std::string& name() const { return node_->name; }
  /// Operand of a unary node, left operand of a binary node.
  const Formula& lhs() const;
  const Formula& rhs() const;

  /// Number of connectives (every non-atom node).
  std::size_t connectives() const;
  /// Maximum number of nested F/G operators on any root-to-leaf path.
  std::size_t temporal_depth() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

 private:
  struct Node {
    Op op;
    std::string name;
    std::vector<Formula> args;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make(Op op, std::vector<Formula> args);

  std::shared_ptr<const Node> node_;
};

bool operator==(const Formula& a, const Formula& b);
std::strong_ordering operator<=>(const Formula& a, const Formula& b);

/// Conjunction of all formulas, left nested. Throws on an empty list.
Formula conjoin(const std::vector<Formula>& parts);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected);

  /// Byte offset into the input where parsing failed.
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

bool is_valid_atom_name(std::string_view name);

/// Throws ParseError on malformed or empty input.
Formula parse(std::string_view text);

/// Canonical text with the minimal parentheses needed to reparse to the
/// same tree.
std::string print(const Formula& f);

/// Negation normal form: negations only on atoms, no -> or <->.
Formula nnf(const Formula& f);

std::set<std::string> atoms(const Formula& f);

/// Number of F nodes in the tree (after nnf this counts eventualities).
std::size_t count_eventually(const Formula& f);

}  // namespace ctxpref::ltl
