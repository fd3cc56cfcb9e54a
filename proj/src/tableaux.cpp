#include "ctxpref/tableaux.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ctxpref::tableaux {

using ltl::Formula;
using ltl::Op;

WorldLabel WorldLabel::named_child(std::string step) const {
  WorldLabel child;
  child.kind = Kind::Named;
  child.prefix = prefix;
  if (kind == Kind::Named) child.prefix.push_back(name);
  child.name = std::move(step);
  return child;
}

WorldLabel WorldLabel::universal_child(std::string variable) const {
  WorldLabel child = named_child(std::move(variable));
  child.kind = Kind::Universal;
  return child;
}

WorldLabel WorldLabel::anchor() const {
  if (kind != Kind::Universal) return *this;
  if (prefix.empty()) return root();
  WorldLabel a;
  a.kind = Kind::Named;
  a.prefix.assign(prefix.begin(), prefix.end() - 1);
  a.name = prefix.back();
  return a;
}

std::string WorldLabel::to_string() const {
  std::string out = "1";
  for (const auto& step : prefix) out += ".[" + step + "]";
  if (kind != Kind::Root) out += ".[" + name + "]";
  return out;
}

bool labels_unify(const WorldLabel& a, const WorldLabel& b, std::span<const WorldLabel> order) {
  if (a.is_universal() && b.is_universal()) return true;
  if (!a.is_universal() && !b.is_universal()) return a == b;
  const WorldLabel& universal = a.is_universal() ? a : b;
  const WorldLabel& concrete = a.is_universal() ? b : a;
  const auto from = std::find(order.begin(), order.end(), universal.anchor());
  const auto at = std::find(order.begin(), order.end(), concrete);
  return from != order.end() && at != order.end() && from <= at;
}

std::string LabeledLiteral::to_string() const {
  std::string lit = (positive ? "" : "!") + atom;
  if (label.kind == WorldLabel::Kind::Root) return lit;
  return label.to_string() + ": " + lit;
}

bool TruthTree::is_open() const {
  return std::any_of(branches.begin(), branches.end(), [](const Branch& b) { return b.is_open(); });
}

std::size_t TruthTree::open_branches() const {
  return static_cast<std::size_t>(
      std::count_if(branches.begin(), branches.end(), [](const Branch& b) { return b.is_open(); }));
}

namespace {

enum class Show {
  /// Already rendered by the node that introduced it.
  Hidden,
  /// Conjunct: render literals only.
  Auto,
  /// Branch alternative or instance: render unless temporal.
  Head,
};

enum class Rule { Literal, Negation, Alpha, Beta, Eventually, Always };

struct Item {
  Formula f;
  bool positive;
  int world;
  Show show;
};

struct UniversalBody {
  Formula f;
  bool positive;
  int anchor;
};

struct Literal {
  bool positive;
  std::string atom;
  int world;  // anchor world for universal literals
  bool universal;
  WorldLabel label;
};

struct State {
  std::vector<WorldLabel> labels;  // by world id
  std::vector<int> order;          // world ids, earliest first
  std::vector<bool> temporal;      // world carries F/G obligations
  std::map<Formula, int> witness;
  std::vector<UniversalBody> universals;
  std::vector<Literal> literals;
  std::set<std::tuple<Formula, int, bool>> seen;
  std::vector<Item> alpha;
  std::deque<Item> beta;
  std::deque<Item> eventualities;
  std::size_t attach = 0;
  std::optional<std::string> placeholder;
};

Rule classify(const Formula& f, bool positive) {
  switch (f.op()) {
    case Op::Atom: return Rule::Literal;
    case Op::Not: return Rule::Negation;
    case Op::And: return positive ? Rule::Alpha : Rule::Beta;
    case Op::Or: return positive ? Rule::Beta : Rule::Alpha;
    case Op::Implies: return positive ? Rule::Beta : Rule::Alpha;
    case Op::Iff: return Rule::Beta;
    case Op::Eventually: return positive ? Rule::Eventually : Rule::Always;
    case Op::Always: return positive ? Rule::Always : Rule::Eventually;
  }
  return Rule::Literal;
}

using Signed = std::pair<Formula, bool>;

std::vector<Signed> alpha_parts(const Formula& f, bool positive) {
  switch (f.op()) {
    case Op::And: return {{f.lhs(), true}, {f.rhs(), true}};
    case Op::Or: return {{f.lhs(), false}, {f.rhs(), false}};
    case Op::Implies: return {{f.lhs(), true}, {f.rhs(), false}};
    default: break;
  }
  (void)positive;
  throw std::logic_error("not an alpha formula");
}

std::vector<std::vector<Signed>> beta_parts(const Formula& f, bool positive) {
  switch (f.op()) {
    case Op::Or: return {{{f.lhs(), true}}, {{f.rhs(), true}}};
    case Op::And: return {{{f.lhs(), false}}, {{f.rhs(), false}}};
    case Op::Implies: return {{{f.lhs(), false}}, {{f.rhs(), true}}};
    case Op::Iff:
      if (positive) return {{{f.lhs(), true}, {f.rhs(), true}}, {{f.lhs(), false}, {f.rhs(), false}}};
      return {{{f.lhs(), true}, {f.rhs(), false}}, {{f.lhs(), false}, {f.rhs(), true}}};
    default: break;
  }
  throw std::logic_error("not a beta formula");
}

Formula effective(const Formula& f, bool positive) {
  return positive ? f : Formula::negation(f);
}

std::string fresh_name(std::size_t n, std::string_view alphabet) {
  std::string name(1, alphabet[n % alphabet.size()]);
  if (const std::size_t round = n / alphabet.size(); round > 0) name += std::to_string(round + 1);
  return name;
}

class Builder {
 public:
  Builder(const Formula& root, const Options& options) : options_(options), tree_{root, {}, {}} {}

  TruthTree run() {
    tree_.nodes.push_back(TreeNode{ltl::print(tree_.root), {}, std::nullopt, {}, std::nullopt});
    State s;
    s.labels.push_back(WorldLabel::root());
    s.order.push_back(0);
    s.temporal.push_back(false);
    push(s, Item{tree_.root, true, 0, Show::Hidden});
    expand(std::move(s));
    return std::move(tree_);
  }

 private:
  // -- tree bookkeeping ----------------------------------------------------

  std::size_t add_node(State& s, std::string text, std::string note = {}) {
    s.placeholder.reset();
    const std::size_t id = tree_.nodes.size();
    tree_.nodes.push_back(TreeNode{std::move(text), std::move(note), s.attach, {}, std::nullopt});
    tree_.nodes[s.attach].children.push_back(id);
    s.attach = id;
    return id;
  }

  void materialize(State& s) {
    if (!s.placeholder) return;
    std::string text = std::move(*s.placeholder);
    s.placeholder.reset();
    add_node(s, std::move(text));
  }

  std::string at(const State& s, int world, const Formula& f) const {
    const WorldLabel& label = s.labels[world];
    if (label.kind == WorldLabel::Kind::Root) return ltl::print(f);
    return label.to_string() + ": " + ltl::print(f);
  }

  std::string order_note(const State& s) const {
    std::string note;
    for (int w : s.order) {
      if (!note.empty()) note += " < ";
      note += s.labels[w].kind == WorldLabel::Kind::Root ? "1" : s.labels[w].name;
    }
    return note;
  }

  bool finish(State& s, BranchStatus status, Closure closure) {
    materialize(s);
    Branch branch;
    for (const auto& lit : s.literals) branch.literals.push_back({lit.positive, lit.atom, lit.label});
    for (int w : s.order) branch.worlds.push_back(s.labels[w]);
    branch.status = status;
    branch.closure = closure;
    branch.leaf = s.attach;
    tree_.nodes[s.attach].mark = status;
    tree_.branches.push_back(std::move(branch));
    return status == BranchStatus::Open;
  }

  // -- world order ---------------------------------------------------------

  static std::size_t rank(const State& s, int world) {
    return static_cast<std::size_t>(std::find(s.order.begin(), s.order.end(), world) - s.order.begin());
  }

  // -- agenda --------------------------------------------------------------

  void push(State& s, Item item) {
    if (item.f.temporal_depth() > 0) s.temporal[item.world] = true;
    s.alpha.push_back(std::move(item));
  }

  /// Returns false when the branch closed.
  bool insert_literal(State& s, bool positive, const std::string& atom, int world, bool universal,
                      WorldLabel label) {
    bool clash = false;
    for (const auto& other : s.literals) {
      if (other.atom != atom || other.positive == positive) continue;
      if (universal && other.universal) {
        clash = true;
      } else if (universal) {
        clash = rank(s, world) <= rank(s, other.world);
      } else if (other.universal) {
        clash = rank(s, other.world) <= rank(s, world);
      } else {
        clash = other.world == world;
      }
      if (clash) break;
    }
    s.literals.push_back({positive, atom, world, universal, std::move(label)});
    return !clash;
  }

  void instantiate(State& s, const UniversalBody& body, int world) {
    push(s, Item{body.f, body.positive, world, Show::Head});
  }

  /// Processes a formula holding at every world from `anchor` on, under the
  /// universal label `label`. Returns false when the branch closed.
  bool schematic(State& s, const Formula& f, bool positive, int anchor, const WorldLabel& label,
                 Show show) {
    switch (classify(f, positive)) {
      case Rule::Negation:
        return schematic(s, f.lhs(), !positive, anchor, label, show);
      case Rule::Literal: {
        if (!s.seen.insert({ltl::nnf(effective(f, positive)), anchor, true}).second) return true;
        if (show != Show::Hidden) add_node(s, label.to_string() + ": " + ltl::print(effective(f, positive)));
        return insert_literal(s, positive, f.name(), anchor, true, label);
      }
      case Rule::Alpha:
        for (const auto& [part, sign] : alpha_parts(f, positive)) {
          if (!schematic(s, part, sign, anchor, label, Show::Auto)) return false;
        }
        return true;
      case Rule::Always:
        return schematic(s, f.lhs(), positive, anchor, label, Show::Auto);
      case Rule::Beta:
      case Rule::Eventually: {
        if (!s.seen.insert({ltl::nnf(effective(f, positive)), anchor, true}).second) return true;
        const UniversalBody body{f, positive, anchor};
        s.universals.push_back(body);
        const std::size_t from = rank(s, anchor);
        for (std::size_t i = s.order.size(); i-- > from;) instantiate(s, body, s.order[i]);
        return true;
      }
    }
    return true;
  }

  /// Returns false when the branch closed.
  bool process(State& s, const Item& item) {
    const Rule rule = classify(item.f, item.positive);
    if (rule == Rule::Negation) {
      push(s, Item{item.f.lhs(), !item.positive, item.world, item.show});
      return true;
    }
    const Formula eff = effective(item.f, item.positive);
    if (!s.seen.insert({ltl::nnf(eff), item.world, false}).second) return true;

    switch (rule) {
      case Rule::Literal:
        if (item.show != Show::Hidden) add_node(s, at(s, item.world, eff));
        return insert_literal(s, item.positive, item.f.name(), item.world, false, s.labels[item.world]);
      case Rule::Alpha: {
        if (item.show == Show::Head) add_node(s, at(s, item.world, eff));
        auto parts = alpha_parts(item.f, item.positive);
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
          push(s, Item{it->first, it->second, item.world, Show::Auto});
        }
        return true;
      }
      case Rule::Beta:
        if (item.show == Show::Head) add_node(s, at(s, item.world, eff));
        s.beta.push_back(item);
        return true;
      case Rule::Eventually:
        s.eventualities.push_back(item);
        return true;
      case Rule::Always: {
        const WorldLabel label = s.labels[item.world].universal_child(fresh_name(universal_count_++, "xyz"));
        const Formula& body = item.f.lhs();
        add_node(s, label.to_string() + ": " + ltl::print(effective(body, item.positive)));
        return schematic(s, body, item.positive, item.world, label, Show::Hidden);
      }
      case Rule::Negation:
        break;
    }
    return true;
  }

  // -- branching -----------------------------------------------------------

  bool expand(State s) {
    for (;;) {
      if (!s.alpha.empty()) {
        Item item = std::move(s.alpha.back());
        s.alpha.pop_back();
        if (!process(s, item)) return finish(s, BranchStatus::Closed, Closure::Clash);
        continue;
      }
      if (!s.beta.empty()) {
        Item item = std::move(s.beta.front());
        s.beta.pop_front();
        return split(std::move(s), item);
      }
      if (!s.eventualities.empty()) {
        Item item = std::move(s.eventualities.front());
        s.eventualities.pop_front();
        return eventually(std::move(s), item);
      }
      return finish(s, BranchStatus::Open, Closure::None);
    }
  }

  bool split(State s, const Item& item) {
    materialize(s);
    bool open = false;
    for (const auto& alternative : beta_parts(item.f, item.positive)) {
      State child = s;
      std::string text;
      for (const auto& [part, sign] : alternative) {
        if (!text.empty()) text += ", ";
        text += at(s, item.world, effective(part, sign));
      }
      child.placeholder = std::move(text);
      for (auto it = alternative.rbegin(); it != alternative.rend(); ++it) {
        push(child, Item{it->first, it->second, item.world, Show::Head});
      }
      open = expand(std::move(child)) || open;
    }
    return open;
  }

  struct Placement {
    enum class Kind { Existing, NewAfter } kind;
    /// Existing: the world. NewAfter: index into order after which to insert.
    std::size_t where;
  };

  std::size_t place(State& s, const Item& item, const Formula& key, const Formula& body, bool sign,
                    const Placement& p, bool annotate) {
    int world;
    if (p.kind == Placement::Kind::Existing) {
      world = static_cast<int>(p.where);
    } else {
      world = static_cast<int>(s.labels.size());
      s.labels.push_back(s.labels[item.world].named_child(fresh_name(named_count_++, "abcdefghijklmnopqrstuvw")));
      s.temporal.push_back(false);
      s.order.insert(s.order.begin() + static_cast<std::ptrdiff_t>(p.where) + 1, world);
    }
    s.witness.emplace(key, world);
    const std::size_t node = add_node(s, at(s, world, effective(body, sign)), annotate ? order_note(s) : std::string{});
    if (p.kind == Placement::Kind::NewAfter) {
      const std::size_t r = rank(s, world);
      for (auto it = s.universals.rbegin(); it != s.universals.rend(); ++it) {
        if (rank(s, it->anchor) <= r) instantiate(s, *it, world);
      }
    }
    push(s, Item{body, sign, world, Show::Hidden});
    return node;
  }

  bool eventually(State s, const Item& item) {
    const Formula key = ltl::nnf(effective(item.f, item.positive));
    const Formula& body = item.f.lhs();
    const bool sign = item.positive;
    const std::size_t from = rank(s, item.world);

    if (auto found = s.witness.find(key); found != s.witness.end()) {
      if (rank(s, found->second) >= from) return expand(std::move(s));
      add_node(s, at(s, item.world, effective(item.f, item.positive)),
               "witness " + s.labels[found->second].to_string() + " is earlier");
      return finish(s, BranchStatus::Closed, Closure::Order);
    }

    std::vector<Placement> options;
    bool later_obligations = false;
    for (std::size_t i = from + 1; i < s.order.size(); ++i) {
      later_obligations = later_obligations || s.temporal[s.order[i]];
    }
    if (options_.prune_dominated_placements && !later_obligations) {
      options.push_back({Placement::Kind::NewAfter, s.order.size() - 1});
    } else {
      for (std::size_t i = from + 1; i < s.order.size(); ++i) {
        options.push_back({Placement::Kind::Existing, static_cast<std::size_t>(s.order[i])});
      }
      for (std::size_t i = from; i < s.order.size(); ++i) {
        options.push_back({Placement::Kind::NewAfter, i});
      }
    }
    const Placement self{Placement::Kind::Existing, static_cast<std::size_t>(item.world)};

    if (options.size() == 1) {
      State copy = s;
      const std::size_t first = place(s, item, key, body, sign, options.front(), false);
      if (expand(std::move(s))) return true;
      // The witness could also be the current world itself; only needed
      // when every later placement fails. Both alternatives then hang
      // below a node of their own.
      if (copy.placeholder) {
        const std::size_t parent = copy.attach;
        materialize(copy);
        auto& siblings = tree_.nodes[parent].children;
        siblings.erase(std::find(siblings.begin(), siblings.end(), first));
        tree_.nodes[first].parent = copy.attach;
        tree_.nodes[copy.attach].children.push_back(first);
      }
      place(copy, item, key, body, sign, self, true);
      return expand(std::move(copy));
    }

    materialize(s);
    bool open = false;
    for (const auto& option : options) {
      State child = s;
      place(child, item, key, body, sign, option, true);
      open = expand(std::move(child)) || open;
    }
    if (open) return true;
    place(s, item, key, body, sign, self, true);
    return expand(std::move(s));
  }

  Options options_;
  TruthTree tree_;
  std::size_t named_count_ = 0;
  std::size_t universal_count_ = 0;
};

}  // namespace

TruthTree build_tree(const Formula& f, const Options& options) { return Builder(f, options).run(); }

Satisfiability is_satisfiable(const Formula& f) {
  return build_tree(f).is_open() ? Satisfiability::Satisfiable : Satisfiability::Unsatisfiable;
}

Validity is_valid(const Formula& f) {
  return build_tree(Formula::negation(f)).is_open() ? Validity::NotValid : Validity::Valid;
}

std::string_view to_string(Satisfiability v) {
  return v == Satisfiability::Satisfiable ? "SAT" : "UNSAT";
}

std::string_view to_string(Validity v) { return v == Validity::Valid ? "VALID" : "NOT VALID"; }

std::vector<Consequence> open_consequences(const TruthTree& tree) {
  std::vector<Consequence> out;
  for (std::size_t i = 0; i < tree.branches.size(); ++i) {
    const Branch& b = tree.branches[i];
    if (!b.is_open()) continue;
    Consequence c{i + 1, {}};
    for (const auto& lit : b.literals) {
      if (lit.positive && lit.label.kind == WorldLabel::Kind::Named) c.atoms.insert(lit.atom);
    }
    out.push_back(std::move(c));
  }
  return out;
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "ascii") return ExportFormat::Ascii;
  if (name == "dot") return ExportFormat::Dot;
  throw std::invalid_argument("unknown tree format '" + std::string(name) + "' (expected ascii or dot)");
}

namespace {

constexpr std::string_view kClosedMark = "×";  // ×
constexpr std::string_view kOpenMark = "○";    // ○

std::string node_line(const TreeNode& n) {
  std::string line = n.text;
  if (!n.note.empty()) line += "  {" + n.note + "}";
  if (n.mark) {
    line += ' ';
    line += *n.mark == BranchStatus::Closed ? kClosedMark : kOpenMark;
  }
  return line;
}

void render_ascii(const TruthTree& t, std::size_t id, const std::string& first, const std::string& rest,
                  std::string& out) {
  const TreeNode& n = t.nodes[id];
  out += first + node_line(n) + "\n";
  if (n.children.size() == 1) {
    render_ascii(t, n.children.front(), rest, rest, out);
    return;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    const bool last = i + 1 == n.children.size();
    render_ascii(t, n.children[i], rest + (last ? "`-- " : "+-- "), rest + (last ? "    " : "|   "), out);
  }
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string export_tree(const TruthTree& tree, ExportFormat format) {
  std::string out;
  if (format == ExportFormat::Ascii) {
    render_ascii(tree, 0, "", "", out);
    return out;
  }
  out += "digraph truth_tree {\n";
  out += "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    out += "  n" + std::to_string(i) + " [label=\"" + dot_escape(node_line(n)) + "\"";
    if (n.mark) out += *n.mark == BranchStatus::Closed ? ", peripheries=2" : ", style=rounded";
    out += "];\n";
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    for (std::size_t c : tree.nodes[i].children) {
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(c) + ";\n";
    }
  }
  out += "}\n";
  return out;
}

}  // namespace ctxpref::tableaux
