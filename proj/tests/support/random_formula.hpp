#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ctxpref/ltl.hpp"

namespace ctxpref::testing {

struct FormulaShape {
  std::size_t atoms = 4;
  std::size_t max_connectives = 12;
  std::size_t max_temporal_depth = 2;
};

/// Random formulas within the shape, reproducible per seed.
class FormulaGenerator {
 public:
  explicit FormulaGenerator(std::uint64_t seed, FormulaShape shape = {});

  ltl::Formula next();

 private:
  ltl::Formula build(std::size_t budget, std::size_t depth);
  std::uint64_t draw(std::uint64_t n) { return rng_() % n; }

  std::mt19937_64 rng_;
  FormulaShape shape_;
};

/// The first `count` formulas of the generator with this seed.
std::vector<ltl::Formula> random_formulas(std::uint64_t seed, std::size_t count, FormulaShape shape = {});

}  // namespace ctxpref::testing
