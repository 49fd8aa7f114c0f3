#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciff/formula.hpp"
#include "ciff/solver.hpp"
#include "ciff/unification.hpp"

namespace ciff {

class NotSuccessful : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A disequality X =/= t read off an implication [X = t -> false].
struct Disequality {
    TermPtr var;
    TermPtr term;
};

struct ExtractedAnswer {
    std::vector<Atom> delta;
    std::vector<CAtom> gamma;
    std::vector<Equation> equalities;  // E
    std::vector<Disequality> disequalities;
};

// Reads an answer off a successful leaf. Variables linked to a constraint
// variable through variable-variable equalities count as constraint variables.
ExtractedAnswer extract(const Node& leaf);

// Shape check used before printing: Delta, Gamma, E and DE cover exactly the
// matching conjuncts of the leaf. Returns a description of the first mismatch.
std::string check_extraction(const Node& leaf, const ExtractedAnswer& a);

struct GroundAnswer {
    std::vector<Atom> delta;
    Substitution witness;             // every variable of the answer to a ground term
    std::map<std::string, TermPtr> skolems;  // sk_<n> to the variable it replaces
};

// Enumerates groundings: constraint variables by labeling, E by substitution,
// the rest by fresh `sk_<n>` constants. The callback returns false to stop.
// Returns false if the solver budget ran out.
bool ground_answer(const ExtractedAnswer& a, const SolverConfig& cfg,
                   const std::function<bool(const GroundAnswer&)>& emit);

// Triple "[abducibles], [disequalities], [constraints]".
// With `show_equalities` a fourth list holds E.
std::string format_answer(const ExtractedAnswer& a, bool show_equalities = false);

// One JSON object per answer. `ground` adds a witness when given.
std::string answer_json(const ExtractedAnswer& a, bool show_equalities = false, const GroundAnswer* ground = nullptr);
std::string status_json(const std::string& status);

}  // namespace ciff
