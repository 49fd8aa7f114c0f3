#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ciff/term.hpp"

namespace ciff {

using Equation = std::pair<TermPtr, TermPtr>;

// Tells the rewriter which variables are universally quantified.
using UniversalTest = std::function<bool(VarId)>;

enum class RewriteKind { Unchanged, Decomposed, True, False, Oriented };

struct EqRewriteOutcome {
    RewriteKind kind = RewriteKind::Unchanged;
    int rule = 0;                    // 1..6, or 0 when unchanged
    std::vector<Equation> equations; // Decomposed: the argument pairs; Oriented/Unchanged: one equation
};

// Applies the first applicable term-reduction rule to a single equation:
//   (1) decompose f(..)=f(..)   (2) clash   (3) t=t   (4) occurs check
//   (5) orient t=X to X=t       (6) orient so a universal variable is on the left
EqRewriteOutcome rewrite_equality(const Equation& eq, const UniversalTest& universal);

// Full unification of a set of equations: the reduction rules above plus
// variable elimination. Returns the solved form (each left side a distinct
// variable not occurring on any right side) or nullopt on inconsistency.
std::optional<std::vector<Equation>> normalize_equalities(std::vector<Equation> eqs, const UniversalTest& universal);

inline UniversalTest no_universals() {
    return [](VarId) { return false; };
}

}  // namespace ciff
