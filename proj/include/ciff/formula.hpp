#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ciff/syntax.hpp"

namespace ciff {

using ConjunctId = std::uint64_t;

enum class ConjunctKind : std::uint8_t { Atomic, Implicative, Disjunctive };

// One element of a node. Bodies and heads are never empty: `true` and
// `false` fill them. A negative body literal ~A stands for (A -> false).
struct Conjunct {
    ConjunctId id = 0;
    ConjunctKind kind = ConjunctKind::Atomic;
    Atom atom;
    std::vector<Literal> body;
    std::vector<Atom> head;
    std::vector<std::vector<Conjunct>> disjuncts;

    bool is_atomic() const { return kind == ConjunctKind::Atomic; }
    bool is_implication() const { return kind == ConjunctKind::Implicative; }
    bool is_disjunction() const { return kind == ConjunctKind::Disjunctive; }
};

Conjunct make_atomic(ConjunctId id, Atom a);
Conjunct make_implication(ConjunctId id, std::vector<Literal> body, std::vector<Atom> head);
Conjunct make_disjunction(ConjunctId id, std::vector<std::vector<Conjunct>> disjuncts);

void collect_vars(const Conjunct& c, std::set<VarId>& out);
Conjunct substitute(const Conjunct& c, const Substitution& s);

struct Node {
    std::vector<Conjunct> conjuncts;
    bool undefined = false;
    std::set<std::vector<std::int64_t>> guard;

    bool failed() const;
};

// Variables with node scope: those occurring in atomic or disjunctive
// conjuncts. Every other variable is universal in its implication.
std::set<VarId> existential_vars(const Node& n);

// X = t -> false with X existential, t not a universal variable and X not in t.
bool is_ciff_disequality(const Conjunct& c, const std::set<VarId>& existential);

std::string to_string(const Conjunct& c, VarNamer* namer = nullptr);
std::string to_string(const Node& n, VarNamer* namer = nullptr);
std::string to_string(const std::vector<Node>& formula, VarNamer* namer = nullptr);

}  // namespace ciff
