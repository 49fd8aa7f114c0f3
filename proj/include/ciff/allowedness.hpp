#pragma once

#include <set>
#include <string>
#include <vector>

#include "ciff/completion.hpp"
#include "ciff/formula.hpp"

namespace ciff {

// Ordered from weakest to strongest.
enum class Verdict { NotAllowed, CiffAllowed, StaticallyAllowed, IffAllowed };

const char* verdict_name(Verdict v);

struct Violation {
    std::string location;    // e.g. "definition p/1, disjunct 2", "integrity constraint 1", "query"
    std::string variable;
    std::string reason;
    std::string suggestion;  // the `V #= V` padding that repairs it for a constraint variable
};

struct AllowednessReport {
    Verdict verdict = Verdict::NotAllowed;
    std::vector<Violation> violations;
};

// Each check reports its own criterion: verdict is the checked notion when
// `violations` is empty and NotAllowed otherwise.
AllowednessReport check_ciff_allowed(const CiffTheory& theory, const Query& query);
AllowednessReport check_statically_allowed(const CiffTheory& theory, const Query& query);
AllowednessReport check_iff_allowed(const CiffTheory& theory, const Query& query);

// Strongest notion that holds. Violations are those of the next stronger
// notion that fails (the CIFF criterion when nothing holds).
AllowednessReport classify(const CiffTheory& theory, const Query& query);

bool has_constraints(const CiffTheory& theory, const Query& query);

// The three conditions on an implication B -> H with respect to the
// variables that are existential in its node.
bool is_statically_allowed_implication(const Conjunct& implication, const std::set<VarId>& existential);

}  // namespace ciff
