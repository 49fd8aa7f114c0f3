#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciff/syntax.hpp"
#include "ciff/term.hpp"

namespace ciff {

// A constraint atom `lhs op rhs` over integer expressions.
struct CAtom {
    CmpOp op = CmpOp::Eq;
    TermPtr lhs;
    TermPtr rhs;
};

CAtom complement(const CAtom& c);
CmpOp complement(CmpOp op);
std::string to_string(const CAtom& c, VarNamer* namer = nullptr);

struct Interval {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

struct SolverConfig {
    std::int64_t lo = -10'000'000;
    std::int64_t hi = 10'000'000;
    std::uint64_t node_budget = 2'000'000;
};

using Witness = std::map<VarId, std::int64_t>;

struct SatResult {
    enum Kind { Sat, Unsat, BudgetExceeded, IllTyped } kind = Unsat;
    Witness witness;
    std::string diagnostic;
};

class ArithmeticOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

struct ConstraintStore {
    std::vector<CAtom> constraints;
    std::map<VarId, Interval> domains;  // variables absent here use the global bound
};

// Returns an empty string if every atom is over integers, variables and
// arithmetic; otherwise a description of the first offending argument.
std::string ill_typed_reason(const std::vector<CAtom>& atoms);

// Complete within the configured bounds.
SatResult check_sat(const std::vector<CAtom>& atoms, const SolverConfig& cfg = {});
SatResult check_sat(const ConstraintStore& store, const SolverConfig& cfg = {});

// Bounds propagation only. False means the store is certainly unsatisfiable.
bool propagate_consistent(const std::vector<CAtom>& atoms, const SolverConfig& cfg = {});

// Enumerates total groundings of `vars` in lexicographic order (first
// variable slowest). Each emitted witness also assigns every other variable
// of the store. The callback returns false to stop. Returns false if the
// search budget ran out.
bool label(const ConstraintStore& store, const std::vector<VarId>& vars, const SolverConfig& cfg,
           const std::function<bool(const Witness&)>& emit);

// Integer evaluation; throws ArithmeticOverflow. Unbound variables throw
// std::out_of_range.
std::int64_t evaluate(const TermPtr& expr, const Witness& w);
bool holds(const CAtom& c, const Witness& w);
bool compare(CmpOp op, std::int64_t a, std::int64_t b);

}  // namespace ciff
