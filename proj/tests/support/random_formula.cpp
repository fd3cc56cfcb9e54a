#include "random_formula.hpp"

#include <string>

namespace ctxpref::testing {

using ltl::Formula;

FormulaGenerator::FormulaGenerator(std::uint64_t seed, FormulaShape shape) : rng_(seed), shape_(shape) {}

Formula FormulaGenerator::next() { return build(1 + draw(shape_.max_connectives), 0); }

// `budget` is the number of connectives still to place.
Formula FormulaGenerator::build(std::size_t budget, std::size_t depth) {
  if (budget == 0) {
    static const char* names[] = {"p", "q", "r", "s", "t", "u"};
    return Formula::atom(names[draw(shape_.atoms)]);
  }
  const bool temporal_ok = depth < shape_.max_temporal_depth;
  // Unary operators are rarer so that trees stay bushy.
  for (;;) {
    switch (draw(10)) {
      case 0:
        return Formula::negation(build(budget - 1, depth));
      case 1:
      case 2:
        if (!temporal_ok) continue;
        return Formula::eventually(build(budget - 1, depth + 1));
      case 3:
      case 4:
        if (!temporal_ok) continue;
        return Formula::always(build(budget - 1, depth + 1));
      default: {
        const std::size_t left = draw(budget);
        Formula a = build(left, depth);
        Formula b = build(budget - 1 - left, depth);
        switch (draw(4)) {
          case 0: return Formula::conjunction(a, b);
          case 1: return Formula::disjunction(a, b);
          case 2: return Formula::implication(a, b);
          default: return Formula::equivalence(a, b);
        }
      }
    }
  }
}

std::vector<Formula> random_formulas(std::uint64_t seed, std::size_t count, FormulaShape shape) {
  FormulaGenerator gen(seed, shape);
  std::vector<Formula> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen.next());
  return out;
}

}  // namespace ctxpref::testing
