#include "ciff/unification.hpp"

#include <deque>

namespace ciff {

namespace {

bool same_functor(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case TermKind::Int: return a.value == b.value;
        case TermKind::Const: return a.name == b.name;
        case TermKind::Compound: return a.name == b.name && a.args.size() == b.args.size();
        case TermKind::Arith: return a.op == b.op && a.args.size() == b.args.size();
        case TermKind::Var: return false;
    }
    return false;
}

bool has_args(const Term& t) { return t.kind == TermKind::Compound || t.kind == TermKind::Arith; }

}  // namespace

EqRewriteOutcome rewrite_equality(const Equation& eq, const UniversalTest& universal) {
    const TermPtr& l = eq.first;
    const TermPtr& r = eq.second;
    EqRewriteOutcome out;
    if (!l->is_var() && !r->is_var()) {
        if (has_args(*l) && same_functor(*l, *r)) {
            out.kind = RewriteKind::Decomposed;
            out.rule = 1;
            for (std::size_t i = 0; i < l->args.size(); ++i) out.equations.emplace_back(l->args[i], r->args[i]);
            return out;
        }
        if (!same_functor(*l, *r)) {
            out.kind = RewriteKind::False;
            out.rule = 2;
            return out;
        }
    }
    if (term_equal(l, r)) {
        out.kind = RewriteKind::True;
        out.rule = 3;
        return out;
    }
    if (l->is_var() && !r->is_var() && occurs(l->var_id(), r)) {
        out.kind = RewriteKind::False;
        out.rule = 4;
        return out;
    }
    if (!l->is_var() && r->is_var()) {
        out.kind = RewriteKind::Oriented;
        out.rule = 5;
        out.equations.emplace_back(r, l);
        return out;
    }
    if (l->is_var() && r->is_var() && universal(r->var_id()) && !universal(l->var_id())) {
        out.kind = RewriteKind::Oriented;
        out.rule = 6;
        out.equations.emplace_back(r, l);
        return out;
    }
    out.equations.push_back(eq);
    return out;
}

std::optional<std::vector<Equation>> normalize_equalities(std::vector<Equation> eqs, const UniversalTest& universal) {
    std::deque<Equation> queue(eqs.begin(), eqs.end());
    std::vector<Equation> solved;
    while (!queue.empty()) {
        Equation e = queue.front();
        queue.pop_front();
        EqRewriteOutcome o = rewrite_equality(e, universal);
        switch (o.kind) {
            case RewriteKind::False:
                return std::nullopt;
            case RewriteKind::True:
                break;
            case RewriteKind::Decomposed:
            case RewriteKind::Oriented:
                for (auto it = o.equations.rbegin(); it != o.equations.rend(); ++it) queue.push_front(*it);
                break;
            case RewriteKind::Unchanged: {
                Substitution s{{e.first->var_id(), e.second}};
                for (auto& q : queue) q = {substitute(q.first, s), substitute(q.second, s)};
                std::vector<Equation> keep;
                for (auto& sv : solved) {
                    Equation n{substitute(sv.first, s), substitute(sv.second, s)};
                    if (n.first.get() == sv.first.get() && n.second.get() == sv.second.get())
                        keep.push_back(n);
                    else
                        queue.push_back(n);
                }
                solved = std::move(keep);
                solved.push_back(e);
                break;
            }
        }
    }
    return solved;
}

}  // namespace ciff
