#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ciff/formula.hpp"
#include "ciff/syntax.hpp"

namespace ciff {

enum class Truth : std::int8_t { False = 0, Undefined = 1, True = 2 };

Truth kleene_not(Truth t);
Truth kleene_and(Truth a, Truth b);
Truth kleene_or(Truth a, Truth b);
const char* truth_name(Truth t);

class NotGround : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BoundExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    std::int64_t lo = 0;  // integers of the universe
    std::int64_t hi = 2;
    std::size_t fresh_constants = 1;    // extra constants standing for the rest of the universe
    std::size_t max_base = 16;          // abducible base bound for enumeration
    std::size_t max_instances = 2'000'000;  // ground clause instances
};

using Delta = std::set<std::string>;  // ground abducible atoms by rendering

struct Interpretation {
    std::unordered_map<std::string, Truth> truth;  // ground atoms of defined predicates

    bool two_valued() const;
};

// A program grounded over a finite universe: its constants, the integers in
// [lo, hi], `fresh_constants` reserved constants and any extra terms given.
class GroundFramework {
public:
    GroundFramework(const Program& p, const Query& q, const OracleOptions& opts,
                    const std::vector<TermPtr>& extra = {});

    const std::vector<TermPtr>& universe() const { return universe_; }
    std::vector<Atom> abducible_base() const;

    // Least fixpoint of the three-valued consequence operator with abducibles
    // in `delta` true and all other abducibles false.
    Interpretation fixpoint(const Delta& delta) const;

    Truth eval(const Atom& ground, const Interpretation& I, const Delta& delta) const;
    Truth eval(const Literal& ground, const Interpretation& I, const Delta& delta) const;
    // Conjunction of the query, existentially closed over the universe.
    Truth query_truth(const Substitution& sigma, const Interpretation& I, const Delta& delta) const;
    // Conjunction of all integrity constraints, universally closed.
    Truth ic_truth(const Interpretation& I, const Delta& delta) const;
    // Truth of a derivation node, or of a disjunction of nodes.
    Truth node_truth(const Node& n, const Interpretation& I, const Delta& delta) const;
    Truth formula_truth(const std::vector<Node>& nodes, const Interpretation& I, const Delta& delta) const;

    const Program& program() const { return program_; }

private:
    Program program_;
    Query query_;
    OracleOptions opts_;
    std::vector<TermPtr> universe_;
    std::vector<Atom> base_;                                            // defined atoms
    std::unordered_map<std::string, std::vector<std::vector<Literal>>> bodies_;  // ground bodies per head
};

std::string atom_key(const Atom& ground);

// Fixpoint of a ground program; throws NotGround otherwise.
Interpretation fitting_fixpoint(const Program& ground, const std::vector<Atom>& delta);

struct OracleVerdict {
    enum Kind { Valid, Invalid, Inapplicable } kind = Valid;
    std::string reason;
};
const char* verdict_name(OracleVerdict::Kind k);

// Checks a ground answer: `delta` ground, `sigma` binding some query
// variables. Unbound query variables range over the universe.
OracleVerdict check_abductive_answer(const Program& p, const Query& q, const std::vector<Atom>& delta,
                                     const Substitution& sigma, const OracleOptions& opts = {});

struct Enumeration {
    std::vector<std::vector<Atom>> answers;  // every valid subset of the abducible base
    bool two_valued = true;                   // every fixpoint met was two-valued
    std::size_t base_size = 0;
};

// Throws BoundExceeded when the abducible base is larger than `opts.max_base`.
// Stops after `limit` answers.
Enumeration enumerate_answers(const Program& p, const Query& q, const OracleOptions& opts = {},
                              std::size_t limit = SIZE_MAX);

std::vector<std::vector<Atom>> minimal_answers(const std::vector<std::vector<Atom>>& answers);

// Seeded generator of small function-free frameworks over the integer
// constants 0..2.
struct RandomOptions {
    bool constraints = true;
    bool ground = false;               // no variables at all
    bool statically_allowed = false;   // regenerate until the static criterion holds
    int defined = 3;
    int abducibles = 2;
};

struct RandomFramework {
    std::string program;
    std::string query;
};

RandomFramework random_framework(std::uint64_t seed, const RandomOptions& opts = {});

}  // namespace ciff
