#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ctxpref/tableaux.hpp"
#include "oracle.hpp"
#include "random_formula.hpp"

namespace ctxpref::tableaux {
namespace {

using ltl::Formula;
using ltl::parse;

std::string golden(const std::string& name) {
  std::ifstream in(std::string(CTXPREF_GOLDEN_DIR) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::set<std::string> literal_set(const Branch& b) {
  std::set<std::string> out;
  for (const auto& l : b.literals) out.insert(l.to_string());
  return out;
}

std::vector<std::set<std::string>> open_literal_sets(const TruthTree& t) {
  std::vector<std::set<std::string>> out;
  for (const auto& b : t.branches) {
    if (b.is_open()) out.push_back(literal_set(b));
  }
  return out;
}

const char* const kNeverGate = "G !g3 & g3";
const char* const kSinglePreference = "g2 & (g2 -> F p010)";
const char* const kTwoPreferences = "g1 & ((g1 -> F p018) | (g1 -> F p015))";

TEST(GateTrees, NeverEnteredGateClashes) {
  const auto t = build_tree(parse(kNeverGate));
  ASSERT_EQ(t.branches.size(), 1u);
  EXPECT_EQ(t.branches[0].status, BranchStatus::Closed);
  EXPECT_EQ(t.branches[0].closure, Closure::Clash);
  EXPECT_EQ(literal_set(t.branches[0]), (std::set<std::string>{"1.[x]: !g3", "g3"}));
  EXPECT_EQ(export_tree(t, ExportFormat::Ascii), golden("never_gate.txt"));
}

TEST(GateTrees, SinglePreference) {
  const auto t = build_tree(parse(kSinglePreference));
  ASSERT_EQ(t.branches.size(), 2u);
  EXPECT_EQ(t.branches[0].status, BranchStatus::Closed);
  EXPECT_EQ(literal_set(t.branches[0]), (std::set<std::string>{"g2", "!g2"}));
  EXPECT_EQ(t.branches[1].status, BranchStatus::Open);
  EXPECT_EQ(literal_set(t.branches[1]), (std::set<std::string>{"g2", "1.[a]: p010"}));
  EXPECT_EQ(open_consequences(t), (std::vector<Consequence>{{2, {"p010"}}}));
  EXPECT_EQ(export_tree(t, ExportFormat::Ascii), golden("single_preference.txt"));
}

TEST(GateTrees, TwoPreferences) {
  const auto t = build_tree(parse(kTwoPreferences));
  EXPECT_EQ(open_literal_sets(t), (std::vector<std::set<std::string>>{{"g1", "1.[a]: p018"}, {"g1", "1.[b]: p015"}}));
  EXPECT_EQ(open_consequences(t), (std::vector<Consequence>{{2, {"p018"}}, {4, {"p015"}}}));
  EXPECT_EQ(export_tree(t, ExportFormat::Ascii), golden("two_preferences.txt"));
}

TEST(Consequences, NothingTemporal) {
  EXPECT_EQ(open_consequences(build_tree(parse("p & q"))), (std::vector<Consequence>{{1, {}}}));
  EXPECT_TRUE(open_consequences(build_tree(parse(kNeverGate))).empty());
}

TEST(Consequences, OnlyPositiveAtomsAtNamedWorlds) {
  const auto c = open_consequences(build_tree(parse("q & F (p & !r) & G s")));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].atoms, (std::set<std::string>{"p"}));
}

TEST(Decide, Satisfiability) {
  EXPECT_EQ(is_satisfiable(parse(kNeverGate)), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("p & !p")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("G p -> F p")), Satisfiability::Satisfiable);
  EXPECT_EQ(is_satisfiable(parse("!(G p -> F p)")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("G (p | q) & F !p & F !q")), Satisfiability::Satisfiable);
  EXPECT_EQ(is_satisfiable(parse("F p & G !p")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("G F p & G F !p")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("F G p & F G !p")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("F (p & F !p) & G (p -> G p)")), Satisfiability::Unsatisfiable);
  EXPECT_EQ(is_satisfiable(parse("p & F !p & F (!p & F p)")), Satisfiability::Satisfiable);
}

TEST(Decide, Validity) {
  EXPECT_EQ(is_valid(parse("p | !p")), Validity::Valid);
  EXPECT_EQ(is_valid(parse("p")), Validity::NotValid);
  EXPECT_EQ(is_valid(parse("G p -> p")), Validity::Valid);
  EXPECT_EQ(is_valid(parse("p -> F p")), Validity::Valid);
  EXPECT_EQ(is_valid(parse("G p -> F p")), Validity::Valid);
  EXPECT_EQ(is_valid(parse("F G p -> G F p")), Validity::Valid);
  EXPECT_EQ(is_valid(parse("F p -> G p")), Validity::NotValid);
  EXPECT_EQ(to_string(Validity::NotValid), "NOT VALID");
  EXPECT_EQ(to_string(Satisfiability::Unsatisfiable), "UNSAT");
}

TEST(Export, Ascii) {
  EXPECT_EQ(export_tree(build_tree(parse("p")), ExportFormat::Ascii), "p ○\n");
  const auto a = export_tree(build_tree(parse(kNeverGate)), ExportFormat::Ascii);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
  EXPECT_EQ(a.substr(a.size() - 3), "×\n");
}

TEST(Export, Dot) {
  const auto d = export_tree(build_tree(parse(kNeverGate)), ExportFormat::Dot);
  EXPECT_EQ(d.rfind("digraph", 0), 0u);
  EXPECT_NE(d.find("n2 ["), std::string::npos);
  EXPECT_EQ(d.find("n3 ["), std::string::npos);
  EXPECT_NE(d.find("peripheries=2"), std::string::npos);
  EXPECT_EQ(d.back(), '\n');
  const auto open = export_tree(build_tree(parse("p")), ExportFormat::Dot);
  EXPECT_EQ(open.find("peripheries=2"), std::string::npos);
}

TEST(Export, Formats) {
  EXPECT_EQ(parse_export_format("ascii"), ExportFormat::Ascii);
  EXPECT_EQ(parse_export_format("dot"), ExportFormat::Dot);
  EXPECT_THROW(parse_export_format("svg"), std::invalid_argument);
}

TEST(Labels, Rendering) {
  const auto a = WorldLabel::root().named_child("a");
  EXPECT_EQ(WorldLabel::root().to_string(), "1");
  EXPECT_EQ(a.to_string(), "1.[a]");
  EXPECT_EQ(a.universal_child("y").to_string(), "1.[a].[y]");
  EXPECT_EQ(a.universal_child("y").anchor(), a);
  EXPECT_EQ(LabeledLiteral({false, "g3", WorldLabel::root().universal_child("x")}).to_string(), "1.[x]: !g3");
}

TEST(Labels, Unification) {
  const auto root = WorldLabel::root();
  const auto a = root.named_child("a");
  const auto b = root.named_child("b");
  const auto x = root.universal_child("x");
  const auto y = b.universal_child("y");
  const std::vector<WorldLabel> order{root, a, b};
  EXPECT_TRUE(labels_unify(x, root, order));
  EXPECT_TRUE(labels_unify(x, b, order));
  EXPECT_TRUE(labels_unify(y, b, order));
  EXPECT_FALSE(labels_unify(y, a, order));
  EXPECT_FALSE(labels_unify(a, b, order));
  EXPECT_TRUE(labels_unify(a, a, order));
  EXPECT_TRUE(labels_unify(x, y, order));
}

TEST(Tree, Deterministic) {
  for (const auto& f : testing::random_formulas(21, 200)) {
    const auto t1 = build_tree(f);
    const auto t2 = build_tree(f);
    ASSERT_EQ(export_tree(t1, ExportFormat::Ascii), export_tree(t2, ExportFormat::Ascii));
    ASSERT_EQ(t1.branches.size(), t2.branches.size());
  }
}

TEST(Tree, LeavesCarryBranchStatus) {
  for (const auto& f : testing::random_formulas(22, 300)) {
    const auto t = build_tree(f);
    ASSERT_FALSE(t.branches.empty());
    for (const auto& b : t.branches) {
      ASSERT_LT(b.leaf, t.nodes.size());
      ASSERT_TRUE(t.nodes[b.leaf].children.empty());
      ASSERT_EQ(t.nodes[b.leaf].mark, b.status);
      ASSERT_EQ(b.status == BranchStatus::Closed, b.closure != Closure::None);
    }
    std::size_t leaves = 0;
    for (const auto& n : t.nodes) leaves += n.children.empty();
    ASSERT_EQ(leaves, t.branches.size()) << ltl::print(f);
  }
}

// A clash closes a branch only through complementary literals whose labels
// can denote one world; open branches hold no such pair.
TEST(Tree, ClosureMatchesLiterals) {
  for (const auto& f : testing::random_formulas(23, 300)) {
    for (const auto& b : build_tree(f).branches) {
      bool clash = false;
      for (const auto& l : b.literals) {
        for (const auto& m : b.literals) {
          clash = clash || (l.atom == m.atom && l.positive && !m.positive && labels_unify(l.label, m.label, b.worlds));
        }
      }
      if (b.is_open() || b.closure == Closure::Clash) ASSERT_EQ(clash, !b.is_open()) << ltl::print(f);
    }
  }
}

TEST(Properties, ValidityMatchesNegation) {
  for (const auto& f : testing::random_formulas(24, 300)) {
    ASSERT_EQ(is_valid(f) == Validity::Valid,
              is_satisfiable(Formula::negation(f)) == Satisfiability::Unsatisfiable);
  }
}

TEST(Properties, MonotoneClosure) {
  testing::FormulaGenerator gen(25);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < 3000 && checked < 100; ++i) {
    const auto f = gen.next();
    if (is_satisfiable(f) == Satisfiability::Satisfiable) continue;
    ++checked;
    ASSERT_EQ(is_satisfiable(Formula::conjunction(f, gen.next())), Satisfiability::Unsatisfiable);
    ASSERT_EQ(is_satisfiable(Formula::conjunction(gen.next(), f)), Satisfiability::Unsatisfiable);
  }
  EXPECT_GT(checked, 20u);
}

std::size_t count_or(const Formula& f) {
  switch (f.op()) {
    case ltl::Op::Atom: return 0;
    case ltl::Op::Or: return 1 + count_or(f.lhs()) + count_or(f.rhs());
    case ltl::Op::Not:
    case ltl::Op::Eventually:
    case ltl::Op::Always: return count_or(f.lhs());
    default: return count_or(f.lhs()) + count_or(f.rhs());
  }
}

TEST(Properties, BranchCountBoundWithoutEventualities) {
  std::size_t checked = 0;
  for (const auto& f : testing::random_formulas(26, 2000)) {
    const auto n = ltl::nnf(f);
    if (ltl::count_eventually(n) != 0) continue;
    ++checked;
    ASSERT_LE(build_tree(f).branches.size(), std::size_t{1} << count_or(n)) << ltl::print(f);
  }
  EXPECT_GT(checked, 50u);
}

TEST(Properties, PruningDoesNotChangeVerdicts) {
  for (const auto& f : testing::random_formulas(27, 400, {3, 10, 2})) {
    const bool pruned = build_tree(f, {true}).is_open();
    const bool full = build_tree(f, {false}).is_open();
    ASSERT_EQ(pruned, full) << ltl::print(f);
  }
}

TEST(Properties, AgreesWithPathOracle) {
  for (const auto& f : testing::random_formulas(28, 500)) {
    ASSERT_EQ(is_satisfiable(f) == Satisfiability::Satisfiable, testing::bounded_sat(f)) << ltl::print(f);
    const auto g = Formula::negation(f);
    ASSERT_EQ(is_satisfiable(g) == Satisfiability::Satisfiable, testing::bounded_sat(g)) << ltl::print(g);
  }
}

TEST(Properties, AgreesWithOracleOnFewAtomsDeepNesting) {
  for (const auto& f : testing::random_formulas(29, 400, {2, 10, 3})) {
    ASSERT_EQ(is_satisfiable(f) == Satisfiability::Satisfiable, testing::unbounded_sat(f)) << ltl::print(f);
  }
}

}  // namespace
}  // namespace ctxpref::tableaux
