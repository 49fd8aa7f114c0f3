#pragma once

// Independent reference implementations used to cross-check the library.
// They use the library only to build and inspect terms.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ciff/solver.hpp"
#include "ciff/term.hpp"
#include "ciff/unification.hpp"

namespace ref {

using ciff::TermPtr;
using ciff::VarId;

// Textbook Robinson unification over a triangular substitution.
class Robinson {
public:
    std::optional<std::map<VarId, TermPtr>> unify(const std::vector<ciff::Equation>& eqs) {
        bind_.clear();
        for (const auto& [l, r] : eqs)
            if (!unify(l, r)) return std::nullopt;
        std::map<VarId, TermPtr> out;
        for (const auto& [v, t] : bind_) out[v] = resolve(t);
        return out;
    }

private:
    TermPtr walk(TermPtr t) const {
        while (t->is_var()) {
            auto it = bind_.find(t->var_id());
            if (it == bind_.end()) break;
            t = it->second;
        }
        return t;
    }

    bool occurs(VarId v, const TermPtr& t) const {
        TermPtr w = walk(t);
        if (w->is_var()) return w->var_id() == v;
        for (const auto& a : w->args)
            if (occurs(v, a)) return true;
        return false;
    }

    bool unify(const TermPtr& a, const TermPtr& b) {
        TermPtr x = walk(a), y = walk(b);
        if (x->is_var() && y->is_var() && x->var_id() == y->var_id()) return true;
        if (x->is_var()) {
            if (occurs(x->var_id(), y)) return false;
            bind_[x->var_id()] = y;
            return true;
        }
        if (y->is_var()) return unify(y, x);
        if (x->kind != y->kind) return false;
        if (x->kind == ciff::TermKind::Int) return x->value == y->value;
        if (x->name != y->name || x->args.size() != y->args.size()) return false;
        for (std::size_t i = 0; i < x->args.size(); ++i)
            if (!unify(x->args[i], y->args[i])) return false;
        return true;
    }

    TermPtr resolve(const TermPtr& t) const {
        TermPtr w = walk(t);
        if (w->is_var() || w->args.empty()) return w;
        std::vector<TermPtr> args;
        for (const auto& a : w->args) args.push_back(resolve(a));
        return ciff::make_compound(w->name, std::move(args));
    }

    std::map<VarId, TermPtr> bind_;
};

inline TermPtr substitute_ref(const TermPtr& t, const std::map<VarId, TermPtr>& s) {
    if (t->is_var()) {
        auto it = s.find(t->var_id());
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    std::vector<TermPtr> args;
    for (const auto& a : t->args) args.push_back(substitute_ref(a, s));
    return ciff::make_compound(t->name, std::move(args));
}

inline bool same(const TermPtr& a, const TermPtr& b) {
    if (a->kind != b->kind) return false;
    if (a->is_var() || a->kind == ciff::TermKind::Int) return a->value == b->value;
    if (a->name != b->name || a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!same(a->args[i], b->args[i])) return false;
    return true;
}

// s1 is at least as general as the idempotent s2 iff applying s1 then s2
// agrees with s2 on every variable.
inline bool more_general(const std::map<VarId, TermPtr>& s1, const std::map<VarId, TermPtr>& s2,
                         const std::set<VarId>& vars) {
    for (VarId v : vars) {
        TermPtr x = ciff::make_var("V", v);
        if (!same(substitute_ref(substitute_ref(x, s1), s2), substitute_ref(x, s2))) return false;
    }
    return true;
}

// Random Herbrand terms over a small signature.
class TermGen {
public:
    explicit TermGen(std::uint64_t seed) : rng_(seed) {}

    TermPtr term(int depth) {
        int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 5 : 2)(rng_);
        switch (pick) {
            case 0:
            case 1: {
                VarId v = std::uniform_int_distribution<VarId>(1, 4)(rng_);
                return ciff::make_var("X" + std::to_string(v), v);
            }
            case 2: return ciff::make_const(std::uniform_int_distribution<int>(0, 1)(rng_) ? "a" : "b");
            case 3: return ciff::make_compound("g", {term(depth - 1)});
            default: return ciff::make_compound("f", {term(depth - 1), term(depth - 1)});
        }
    }

private:
    std::mt19937_64 rng_;
};

inline std::int64_t eval(const TermPtr& t, const std::map<VarId, std::int64_t>& w) {
    switch (t->kind) {
        case ciff::TermKind::Int: return t->value;
        case ciff::TermKind::Var: return w.at(t->var_id());
        case ciff::TermKind::Arith: {
            std::int64_t a = eval(t->args[0], w);
            switch (t->op) {
                case ciff::ArithOp::Add: return a + eval(t->args[1], w);
                case ciff::ArithOp::Sub: return a - eval(t->args[1], w);
                case ciff::ArithOp::Mul: return a * eval(t->args[1], w);
                case ciff::ArithOp::Abs: return a < 0 ? -a : a;
            }
            break;
        }
        default: break;
    }
    throw std::invalid_argument("not an integer expression");
}

inline bool satisfied(const ciff::CAtom& c, const std::map<VarId, std::int64_t>& w) {
    std::int64_t a = eval(c.lhs, w), b = eval(c.rhs, w);
    switch (c.op) {
        case ciff::CmpOp::Eq: return a == b;
        case ciff::CmpOp::Ne: return a != b;
        case ciff::CmpOp::Lt: return a < b;
        case ciff::CmpOp::Le: return a <= b;
        case ciff::CmpOp::Gt: return a > b;
        case ciff::CmpOp::Ge: return a >= b;
    }
    return false;
}

// Brute-force satisfiability over a box of integers.
inline bool brute_force_sat(const std::vector<ciff::CAtom>& atoms, std::int64_t lo, std::int64_t hi) {
    std::set<VarId> vs;
    for (const auto& c : atoms) {
        ciff::collect_vars(c.lhs, vs);
        ciff::collect_vars(c.rhs, vs);
    }
    std::vector<VarId> vars(vs.begin(), vs.end());
    std::map<VarId, std::int64_t> w;
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == vars.size()) {
            for (const auto& c : atoms)
                if (!satisfied(c, w)) return false;
            return true;
        }
        for (std::int64_t x = lo; x <= hi; ++x) {
            w[vars[i]] = x;
            if (go(i + 1)) return true;
        }
        return false;
    };
    return go(0);
}

// Queens placements: col[r] for r in 0..n-1, 1-based columns.
inline bool queens_ok(const std::vector<int>& col) {
    for (std::size_t i = 0; i < col.size(); ++i)
        for (std::size_t j = i + 1; j < col.size(); ++j) {
            if (col[i] == col[j]) return false;
            if (std::abs(col[i] - col[j]) == static_cast<int>(j - i)) return false;
        }
    return true;
}

inline int count_queens(int n) {
    std::vector<int> col(n, 1);
    int count = 0;
    std::function<void(int)> go = [&](int r) {
        if (r == n) {
            count += queens_ok(col);
            return;
        }
        for (int c = 1; c <= n; ++c) {
            col[r] = c;
            go(r + 1);
        }
    };
    go(0);
    return count;
}

inline int count_colorings(int vertices, const std::vector<std::pair<int, int>>& edges, int colors) {
    std::vector<int> color(vertices + 1, 0);
    int count = 0;
    std::function<void(int)> go = [&](int v) {
        if (v > vertices) {
            for (auto [a, b] : edges)
                if (color[a] == color[b]) return;
            ++count;
            return;
        }
        for (int c = 1; c <= colors; ++c) {
            color[v] = c;
            go(v + 1);
        }
    };
    go(1);
    return count;
}

}  // namespace ref
