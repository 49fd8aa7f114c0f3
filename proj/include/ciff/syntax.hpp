#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciff/term.hpp"

namespace ciff {

enum class AtomKind : std::uint8_t { Defined, Abducible, Constraint, Equality, Truth };
enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_symbol(CmpOp op);   // surface form, e.g. "#=<"
const char* cmp_math(CmpOp op);     // plain form, e.g. "<="

struct Pred {
    std::string name;
    std::size_t arity = 0;
    auto operator<=>(const Pred&) const = default;
};

std::string to_string(const Pred& p);

struct Atom {
    AtomKind kind = AtomKind::Defined;
    std::string pred;           // predicate name; "=" for equality, "true"/"false" for truth
    CmpOp op = CmpOp::Eq;       // meaningful for Constraint atoms only
    std::vector<TermPtr> args;

    Pred predicate() const { return Pred{pred, args.size()}; }
    bool is_true() const { return kind == AtomKind::Truth && pred == "true"; }
    bool is_false() const { return kind == AtomKind::Truth && pred == "false"; }
    bool is_user() const { return kind == AtomKind::Defined || kind == AtomKind::Abducible; }
};

Atom make_true();
Atom make_false();
Atom make_equality(TermPtr lhs, TermPtr rhs);
Atom make_constraint(CmpOp op, TermPtr lhs, TermPtr rhs);
Atom make_user_atom(std::string pred, std::vector<TermPtr> args, AtomKind kind = AtomKind::Defined);

bool atom_equal(const Atom& a, const Atom& b);
int atom_compare(const Atom& a, const Atom& b);
void collect_vars(const Atom& a, std::set<VarId>& out);
void collect_vars_ordered(const Atom& a, std::vector<VarId>& out);
Atom substitute(const Atom& a, const Substitution& s);
Atom rename(const Atom& a, Renamer& r);
bool is_ground(const Atom& a);

struct Literal {
    Atom atom;
    bool positive = true;
};

struct Clause {
    Atom head;
    std::vector<Literal> body;
};

struct IntegrityConstraint {
    std::vector<Literal> body;
    std::vector<Atom> head;  // disjunction; a single `false` atom denotes bottom
};

struct Program {
    std::vector<Clause> clauses;
    std::vector<IntegrityConstraint> ics;
    std::set<Pred> abducibles;
};

struct Query {
    std::vector<Literal> conjuncts;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Parses and merges one or more source documents into a single program.
Program parse_program(const std::vector<std::string>& sources);
Program parse_program(const std::string& source);

// Parses a query. `abducibles` classifies user atoms; `first_var_id` lets the
// caller keep query variable ids disjoint from other units.
Query parse_query(const std::string& text, const std::set<Pred>& abducibles = {}, VarId first_var_id = 1 << 30);

// Parses a comma separated list of atoms (used for answer sets and deltas).
std::vector<Atom> parse_atom_list(const std::string& text, const std::set<Pred>& abducibles = {});

std::string to_string(const Atom& a, VarNamer* namer = nullptr);
std::string to_string(const Literal& l, VarNamer* namer = nullptr);
std::string to_string(const Clause& c);
std::string to_string(const IntegrityConstraint& ic);
std::string to_string(const Program& p);
std::string to_string(const Query& q);

// Every predicate occurring anywhere in the program (heads, bodies, ICs).
std::set<Pred> user_predicates(const Program& p);
std::set<Pred> user_predicates(const Query& q);

}  // namespace ciff
