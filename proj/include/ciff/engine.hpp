#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciff/completion.hpp"
#include "ciff/formula.hpp"
#include "ciff/solver.hpp"

namespace ciff {

// Rule numbers follow the catalogue: 1..18. 0 marks the initial formula.
constexpr int kInit = 0;
std::string rule_name(int rule);

enum class CAtomClass { BasicCAtom, CAtom, HerbrandEquality, NotC };

// `constraint_vars` are the variables of the basic c-conjuncts of the node.
CAtomClass classify_c_atom(const Atom& a, const std::set<VarId>& constraint_vars);
std::set<VarId> constraint_vars(const Node& n);

// Converts an equality or constraint atom to a solver atom (`=` read as `#=`).
CAtom to_catom(const Atom& a);
std::vector<CAtom> c_conjuncts(const Node& n);

struct Selection {
    int rule = 0;
    std::size_t first = 0;   // conjunct index
    std::size_t second = 0;  // partner conjunct index (R3, R5)
    std::size_t pos = 0;     // body position (R2, R3, R6, R9, R11, R12, R13)
};

class InvalidSelection : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepEvent {
    int rule = 0;
    const Node* before = nullptr;
    const std::vector<Node>* successors = nullptr;  // empty when the node is dropped
};

struct EngineConfig {
    std::uint64_t max_steps = 200'000;
    std::uint64_t max_nodes = 100'000;  // live frontier size
    std::uint64_t max_node_size = 0;    // literals in one node; 0 means unbounded
    std::size_t max_answers = std::numeric_limits<std::size_t>::max();
    SolverConfig solver;
    bool fair = false;
    unsigned parallel = 1;
    bool trace = false;
    bool check_invariants = false;  // assert quantifier discipline after every step
    std::function<void(const StepEvent&)> observer;
};

enum class LeafStatus { Success, Failure, Undefined };

struct Leaf {
    LeafStatus status = LeafStatus::Success;
    Node node;
};

struct TraceStep {
    int rule = 0;
    std::string formula;
};

struct DerivationResult {
    enum Status { Success, Failure, Undefined, BudgetExhausted } status = Failure;
    std::vector<Leaf> leaves;  // successful and undefined leaves in exploration order
    std::size_t failures = 0;
    std::size_t undefined = 0;
    std::size_t open_branches = 0;  // branches left unexplored when a budget ran out
    bool budget_exhausted = false;
    std::uint64_t steps = 0;
    std::vector<int> rules;  // rule of every step, Init first
    std::vector<TraceStep> trace;
    std::vector<std::string> invariant_violations;

    std::vector<const Node*> successes() const;
};

const char* status_name(DerivationResult::Status s);

// A derivation context: the theory, and fresh variable and conjunct counters.
class Engine {
public:
    Engine(const CiffTheory& theory, EngineConfig cfg);

    Node initial_node(const Query& q);
    // The rule the selection function picks, if any.
    std::optional<Selection> select(const Node& n) const;
    // Every applicable rule instance in selection priority order.
    std::vector<Selection> applicable(const Node& n) const;
    // Applies a selection and returns the successor nodes.
    std::vector<Node> apply(const Node& n, const Selection& s);
    // Full satisfiability check of a leaf candidate; nullopt when the solver budget runs out.
    std::optional<bool> satisfiable(const Node& n) const;

    DerivationResult derive(const Query& q);

    const CiffTheory& theory() const { return theory_; }
    const EngineConfig& config() const { return cfg_; }

private:
    void scan(const Node& n, const std::function<bool(const Selection&)>& emit) const;

    const CiffTheory& theory_;
    EngineConfig cfg_;
    VarId next_var_;
    ConjunctId next_id_ = 1;

    friend struct Worker;
};

// Pre-checks on a query: every user predicate must keep the arity it has in the program.
void check_query_against_program(const Program& p, const Query& q);

// Naive grounding of integrity constraints whose body variables are all
// covered by atoms of fact-only predicates.
Program preground(const Program& p);

// Quantifier discipline: universal variables of distinct implications are disjoint.
std::vector<std::string> check_quantifiers(const Node& n);

}  // namespace ciff
