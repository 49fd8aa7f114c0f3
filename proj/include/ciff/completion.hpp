#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ciff/syntax.hpp"

namespace ciff {

struct Disjunct {
    std::set<VarId> exist_vars;
    std::vector<Literal> conjuncts;  // head equalities first, then the clause body
};

// p(X1..Xn) <-> D1 v ... v Dk; zero disjuncts means p is false.
struct IffDefinition {
    Pred pred;
    std::vector<TermPtr> head_vars;
    std::vector<Disjunct> disjuncts;
};

struct CiffTheory {
    std::map<Pred, IffDefinition> defs;
    std::set<Pred> abducibles;
    std::vector<IntegrityConstraint> ics;
    VarId max_var_id = 0;  // every variable id in the theory is at most this
};

CiffTheory complete(const Program& program, const std::set<Pred>& extra_predicates = {});
const IffDefinition* definition_of(const CiffTheory& theory, const Pred& pred);

std::string to_string(const IffDefinition& def);
std::string to_string(const CiffTheory& theory);

}  // namespace ciff
