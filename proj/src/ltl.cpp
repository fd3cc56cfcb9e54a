#include "ctxpref/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>

namespace ctxpref::ltl {

namespace {

bool is_unary(Op op) { return op == Op::Not || op == Op::Eventually || op == Op::Always; }

}  // namespace

Formula Formula::make(Op op, std::vector<Formula> args) {
  return Formula(std::make_shared<const Node>(Node{op, {}, std::move(args)}));
}

Formula Formula::atom(std::string name) {
  if (!is_valid_atom_name(name)) {
    throw std::invalid_argument("invalid atom name '" + name + "'");
  }
  return Formula(std::make_shared<const Node>(Node{Op::Atom, std::move(name), {}}));
}

Formula Formula::negation(Formula f) { return make(Op::Not, {std::move(f)}); }
Formula Formula::eventually(Formula f) { return make(Op::Eventually, {std::move(f)}); }
Formula Formula::always(Formula f) { return make(Op::Always, {std::move(f)}); }

Formula Formula::conjunction(Formula lhs, Formula rhs) {
  return make(Op::And, {std::move(lhs), std::move(rhs)});
}
Formula Formula::disjunction(Formula lhs, Formula rhs) {
  return make(Op::Or, {std::move(lhs), std::move(rhs)});
}
Formula Formula::implication(Formula lhs, Formula rhs) {
  return make(Op::Implies, {std::move(lhs), std::move(rhs)});
}
Formula Formula::equivalence(Formula lhs, Formula rhs) {
  return make(Op::Iff, {std::move(lhs), std::move(rhs)});
}

bool Formula::is_literal() const {
  return is_atom() || (op() == Op::Not && lhs().is_atom());
}

const Formula& Formula::lhs() const {
  if (node_->args.empty()) throw std::logic_error("atom has no operands");
  return node_->args[0];
}

const Formula& Formula::rhs() const {
  if (node_->args.size() < 2) throw std::logic_error("formula has no right operand");
  return node_->args[1];
}

std::size_t Formula::connectives() const {
  if (is_atom()) return 0;
  std::size_t n = 1;
  for (const auto& a : node_->args) n += a.connectives();
  return n;
}

std::size_t Formula::temporal_depth() const {
  std::size_t deepest = 0;
  for (const auto& a : node_->args) deepest = std::max(deepest, a.temporal_depth());
  return deepest + (is_temporal() ? 1 : 0);
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->op != b.node_->op || a.node_->name != b.node_->name) return false;
  return a.node_->args == b.node_->args;
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->op <=> b.node_->op; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  const auto& x = a.node_->args;
  const auto& y = b.node_->args;
  return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
}

Formula conjoin(const std::vector<Formula>& parts) {
  if (parts.empty()) throw std::invalid_argument("conjoin: no formulas");
  Formula result = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    result = Formula::conjunction(result, parts[i]);
  }
  return result;
}

ParseError::ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
    : std::runtime_error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

bool is_valid_atom_name(std::string_view name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Atom, Not, Eventually, Always, And, Or, Implies, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Formula parse_all() {
    if (current_.kind == Tok::End) {
      fail("empty formula", {"atom", "!", "F", "G", "("});
    }
    Formula f = parse_iff();
    if (current_.kind != Tok::End) {
      fail("unexpected " + describe(current_), {"&", "|", "->", "<->", "end of input"});
    }
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) {
    std::ostringstream msg;
    msg << "syntax error at offset " << current_.offset << ": " << what << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      msg << (i ? ", " : "") << expected[i];
    }
    msg << ")";
    throw ParseError(msg.str(), current_.offset, std::move(expected));
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {Tok::End, start, {}};
      return;
    }
    const char c = text_[pos_];
    auto single = [&](Tok kind) {
      ++pos_;
      current_ = {kind, start, std::string(1, c)};
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '!': return single(Tok::Not);
      case '&': return single(Tok::And);
      case '|': return single(Tok::Or);
      case 'F': return single(Tok::Eventually);
      case 'G': return single(Tok::Always);
      default: break;
    }
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      current_ = {Tok::Implies, start, "->"};
      return;
    }
    if (text_.substr(pos_, 3) == "<->") {
      pos_ += 3;
      current_ = {Tok::Iff, start, "<->"};
      return;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      current_ = {Tok::Atom, start, std::string(text_.substr(start, pos_ - start))};
      return;
    }
    current_ = {Tok::End, start, std::string(1, c)};
    fail("unexpected character '" + std::string(1, c) + "'",
         {"atom", "!", "F", "G", "(", ")", "&", "|", "->", "<->"});
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (current_.kind != Tok::Iff) return lhs;
    advance();
    Formula rhs = parse_implies();
    if (current_.kind == Tok::Iff) {
      fail("chained '<->' needs parentheses", {"&", "|", "->", ")", "end of input"});
    }
    return Formula::equivalence(std::move(lhs), std::move(rhs));
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (current_.kind != Tok::Implies) return lhs;
    advance();
    return Formula::implication(std::move(lhs), parse_implies());
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (current_.kind == Tok::Or) {
      advance();
      lhs = Formula::disjunction(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (current_.kind == Tok::And) {
      advance();
      lhs = Formula::conjunction(std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Formula parse_unary() {
    switch (current_.kind) {
      case Tok::Not:
        advance();
        return Formula::negation(parse_unary());
      case Tok::Eventually:
        advance();
        return Formula::eventually(parse_unary());
      case Tok::Always:
        advance();
        return Formula::always(parse_unary());
      case Tok::Atom: {
        Formula a = Formula::atom(current_.text);
        advance();
        return a;
      }
      case Tok::LParen: {
        advance();
        Formula inner = parse_iff();
        if (current_.kind != Tok::RParen) {
          fail("unexpected " + describe(current_), {")", "&", "|", "->", "<->"});
        }
        advance();
        return inner;
      }
      default:
        fail("unexpected " + describe(current_), {"atom", "!", "F", "G", "("});
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Tok::End, 0, {}};
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not:
    case Op::Eventually:
    case Op::Always: return 5;
    case Op::Atom: return 6;
  }
  return 6;
}

void print_into(const Formula& f, std::string& out);

void print_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(f, out);
  if (parens) out += ')';
}

void print_into(const Formula& f, std::string& out) {
  const Op op = f.op();
  const int p = precedence(op);
  switch (op) {
    case Op::Atom:
      out += f.name();
      return;
    case Op::Not:
      out += '!';
      print_operand(f.lhs(), precedence(f.lhs().op()) < p, out);
      return;
    case Op::Eventually:
    case Op::Always:
      out += op == Op::Eventually ? "F " : "G ";
      print_operand(f.lhs(), precedence(f.lhs().op()) < p, out);
      return;
    case Op::And:
    case Op::Or: {
      print_operand(f.lhs(), precedence(f.lhs().op()) < p, out);
      out += op == Op::And ? " & " : " | ";
      print_operand(f.rhs(), precedence(f.rhs().op()) <= p, out);
      return;
    }
    case Op::Implies:
      print_operand(f.lhs(), precedence(f.lhs().op()) <= p, out);
      out += " -> ";
      print_operand(f.rhs(), precedence(f.rhs().op()) < p, out);
      return;
    case Op::Iff:
      print_operand(f.lhs(), precedence(f.lhs().op()) <= p, out);
      out += " <-> ";
      print_operand(f.rhs(), precedence(f.rhs().op()) <= p, out);
      return;
  }
}

Formula nnf_signed(const Formula& f, bool positive) {
  using F = Formula;
  switch (f.op()) {
    case Op::Atom:
      return positive ? f : F::negation(f);
    case Op::Not:
      return nnf_signed(f.lhs(), !positive);
    case Op::And:
      return positive ? F::conjunction(nnf_signed(f.lhs(), true), nnf_signed(f.rhs(), true))
                      : F::disjunction(nnf_signed(f.lhs(), false), nnf_signed(f.rhs(), false));
    case Op::Or:
      return positive ? F::disjunction(nnf_signed(f.lhs(), true), nnf_signed(f.rhs(), true))
                      : F::conjunction(nnf_signed(f.lhs(), false), nnf_signed(f.rhs(), false));
    case Op::Implies:
      return positive ? F::disjunction(nnf_signed(f.lhs(), false), nnf_signed(f.rhs(), true))
                      : F::conjunction(nnf_signed(f.lhs(), true), nnf_signed(f.rhs(), false));
    case Op::Iff: {
      // a <-> b  =  (a & b) | (!a & !b);   !(a <-> b)  =  (a & !b) | (!a & b)
      const F a = nnf_signed(f.lhs(), true);
      const F na = nnf_signed(f.lhs(), false);
      const F b = nnf_signed(f.rhs(), true);
      const F nb = nnf_signed(f.rhs(), false);
      return positive ? F::disjunction(F::conjunction(a, b), F::conjunction(na, nb))
                      : F::disjunction(F::conjunction(a, nb), F::conjunction(na, b));
    }
    case Op::Eventually:
      return positive ? F::eventually(nnf_signed(f.lhs(), true))
                      : F::always(nnf_signed(f.lhs(), false));
    case Op::Always:
      return positive ? F::always(nnf_signed(f.lhs(), true))
                      : F::eventually(nnf_signed(f.lhs(), false));
  }
  return f;
}

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.is_atom()) {
    out.insert(f.name());
    return;
  }
  collect_atoms(f.lhs(), out);
  if (!is_unary(f.op())) collect_atoms(f.rhs(), out);
}

}  // namespace

std::string print(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

Formula nnf(const Formula& f) { return nnf_signed(f, true); }

std::set<std::string> atoms(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

std::size_t count_eventually(const Formula& f) {
  if (f.is_atom()) return 0;
  std::size_t n = f.op() == Op::Eventually ? 1 : 0;
  n += count_eventually(f.lhs());
  if (!is_unary(f.op())) n += count_eventually(f.rhs());
  return n;
}

}  // namespace ctxpref::ltl
