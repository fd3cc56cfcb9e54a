#pragma once

// Model-checking oracles for the F/G fragment over finite paths whose last
// state repeats forever. Independent of the tableau code.

#include <cstddef>

#include "ctxpref/ltl.hpp"

namespace ctxpref::testing {

/// Number of positions the bounded oracles explore: one per eventuality of
/// the negation normal form, plus the final state.
std::size_t path_bound(const ltl::Formula& f);

/// Enumerates every path of length 1..max_length over the formula's atoms
/// and evaluates the formula at position 0. Exponential; small inputs only.
bool enumerate_paths_sat(const ltl::Formula& f, std::size_t max_length);

/// Same question as enumerate_paths_sat(f, path_bound(f)) answered by
/// growing the set of suffix types one position at a time.
bool bounded_sat(const ltl::Formula& f);
bool bounded_valid(const ltl::Formula& f);

/// Types of paths of any length, to a fixpoint.
bool unbounded_sat(const ltl::Formula& f);

}  // namespace ctxpref::testing
