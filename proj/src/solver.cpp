#include "ciff/solver.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace ciff {

CmpOp complement(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return CmpOp::Ne;
        case CmpOp::Ne: return CmpOp::Eq;
        case CmpOp::Lt: return CmpOp::Ge;
        case CmpOp::Ge: return CmpOp::Lt;
        case CmpOp::Gt: return CmpOp::Le;
        case CmpOp::Le: return CmpOp::Gt;
    }
    return op;
}

CAtom complement(const CAtom& c) { return CAtom{complement(c.op), c.lhs, c.rhs}; }

std::string to_string(const CAtom& c, VarNamer* namer) {
    return to_string(c.lhs, namer) + cmp_symbol(c.op) + to_string(c.rhs, namer);
}

bool compare(CmpOp op, std::int64_t a, std::int64_t b) {
    switch (op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
    }
    return false;
}

std::int64_t evaluate(const TermPtr& e, const Witness& w) {
    std::int64_t r = 0;
    switch (e->kind) {
        case TermKind::Int:
            return e->value;
        case TermKind::Var: {
            auto it = w.find(e->var_id());
            if (it == w.end()) throw std::out_of_range("unbound variable " + e->name);
            return it->second;
        }
        case TermKind::Arith: {
            std::int64_t a = evaluate(e->args[0], w);
            if (e->op == ArithOp::Abs) {
                if (a == std::numeric_limits<std::int64_t>::min()) throw ArithmeticOverflow("abs overflow");
                return a < 0 ? -a : a;
            }
            std::int64_t b = evaluate(e->args[1], w);
            bool bad = false;
            switch (e->op) {
                case ArithOp::Add: bad = __builtin_add_overflow(a, b, &r); break;
                case ArithOp::Sub: bad = __builtin_sub_overflow(a, b, &r); break;
                case ArithOp::Mul: bad = __builtin_mul_overflow(a, b, &r); break;
                case ArithOp::Abs: break;
            }
            if (bad) throw ArithmeticOverflow("integer overflow while evaluating " + to_string(e));
            return r;
        }
        case TermKind::Const:
        case TermKind::Compound:
            break;
    }
    throw std::invalid_argument("not an integer expression: " + to_string(e));
}

bool holds(const CAtom& c, const Witness& w) { return compare(c.op, evaluate(c.lhs, w), evaluate(c.rhs, w)); }

namespace {

bool well_typed(const TermPtr& t, std::string& why) {
    switch (t->kind) {
        case TermKind::Int:
        case TermKind::Var:
            return true;
        case TermKind::Arith:
            for (const auto& a : t->args)
                if (!well_typed(a, why)) return false;
            return true;
        case TermKind::Const:
        case TermKind::Compound:
            why = "non-integer term '" + to_string(t) + "' in a constraint";
            return false;
    }
    return false;
}

}  // namespace

std::string ill_typed_reason(const std::vector<CAtom>& atoms) {
    std::string why;
    for (const auto& c : atoms)
        if (!well_typed(c.lhs, why) || !well_typed(c.rhs, why)) return why;
    return {};
}

namespace {

using i128 = __int128;
constexpr std::int64_t kBig = std::int64_t(1) << 62;

std::int64_t clamp(i128 v) {
    if (v > kBig) return kBig;
    if (v < -kBig) return -kBig;
    return static_cast<std::int64_t>(v);
}

i128 floor_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

i128 ceil_div(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

struct BudgetOut {};

struct ENode {
    enum K { Var, Const, Add, Sub, Mul, Abs } k = Const;
    int a = -1, b = -1;
    int var = -1;
    std::int64_t c = 0;
};

struct Con {
    CmpOp op;
    int lhs, rhs;
    const CAtom* src;
};

using Doms = std::vector<Interval>;

using Linear = std::map<VarId, i128>;

// Linear form of an expression, or false when it is not linear.
bool linearize(const TermPtr& t, i128 scale, Linear& coeffs, i128& constant) {
    constexpr i128 kLimit = i128(1) << 62;
    switch (t->kind) {
        case TermKind::Int:
            constant += scale * t->value;
            return constant > -kLimit && constant < kLimit;
        case TermKind::Var:
            coeffs[t->var_id()] += scale;
            return coeffs[t->var_id()] > -kLimit && coeffs[t->var_id()] < kLimit;
        case TermKind::Arith:
            switch (t->op) {
                case ArithOp::Add:
                    return linearize(t->args[0], scale, coeffs, constant) && linearize(t->args[1], scale, coeffs, constant);
                case ArithOp::Sub:
                    return linearize(t->args[0], scale, coeffs, constant) && linearize(t->args[1], -scale, coeffs, constant);
                case ArithOp::Mul: {
                    int k = t->args[0]->kind == TermKind::Int ? 0 : (t->args[1]->kind == TermKind::Int ? 1 : -1);
                    if (k < 0) return false;
                    i128 factor = scale * t->args[k]->value;
                    if (factor <= -kLimit || factor >= kLimit) return false;
                    return linearize(t->args[1 - k], factor, coeffs, constant);
                }
                case ArithOp::Abs:
                    return false;
            }
            return false;
        default:
            return false;
    }
}

TermPtr weighted_sum(const std::vector<std::pair<VarId, i128>>& terms, std::int64_t constant) {
    TermPtr out;
    auto add = [&](TermPtr t) { out = out ? make_arith(ArithOp::Add, {out, t}) : t; };
    for (const auto& [v, a] : terms) {
        TermPtr x = make_var("_", v);
        add(a == 1 ? x : make_arith(ArithOp::Mul, {make_int(static_cast<std::int64_t>(a)), x}));
    }
    if (constant != 0 || !out) add(make_int(constant));
    return out;
}

// Rewrites lhs op rhs as (positive part) op (negative part + constant) when linear.
std::pair<TermPtr, TermPtr> canonical(const CAtom& c) {
    Linear coeffs;
    i128 constant = 0;
    if (!linearize(c.lhs, 1, coeffs, constant) || !linearize(c.rhs, -1, coeffs, constant)) return {c.lhs, c.rhs};
    std::vector<std::pair<VarId, i128>> pos, neg;
    for (const auto& [v, a] : coeffs) {
        if (a > 0) pos.emplace_back(v, a);
        if (a < 0) neg.emplace_back(v, -a);
    }
    return {weighted_sum(pos, 0), weighted_sum(neg, static_cast<std::int64_t>(-constant))};
}

class Problem {
public:
    Problem(const std::vector<CAtom>& atoms, const std::map<VarId, Interval>& domains, const SolverConfig& cfg)
        : cfg_(cfg) {
        for (const auto& c : atoms) {
            std::set<VarId> vs;
            collect_vars(c.lhs, vs);
            collect_vars(c.rhs, vs);
            for (VarId v : vs) ensure_var(v);
            auto [l, r] = canonical(c);
            if (l->kind == TermKind::Int && r->kind == TermKind::Int) {
                trivially_false_ |= !compare(c.op, l->value, r->value);
                continue;
            }
            cons_.push_back(Con{c.op, compile(l), compile(r), &c});
        }
        init_.resize(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = domains.find(vars_[i]);
            init_[i] = it == domains.end() ? Interval{cfg.lo, cfg.hi} : it->second;
        }
        val_.resize(nodes_.size());
    }

    int index_of(VarId v) const {
        auto it = index_.find(v);
        return it == index_.end() ? -1 : it->second;
    }
    int ensure_var(VarId v) {
        auto it = index_.find(v);
        if (it != index_.end()) return it->second;
        int i = static_cast<int>(vars_.size());
        vars_.push_back(v);
        index_.emplace(v, i);
        init_.push_back(Interval{cfg_.lo, cfg_.hi});
        return i;
    }
    const std::vector<VarId>& vars() const { return vars_; }
    Doms initial() const { return init_; }

    bool propagate(Doms& d) {
        if (trivially_false_) return false;
        for (const auto& iv : d)
            if (iv.lo > iv.hi) return false;
        for (int round = 0; round < 200; ++round) {
            changed_ = false;
            for (const auto& c : cons_)
                if (!revise(c, d)) return false;
            if (!changed_) return true;
        }
        return true;
    }

    bool verify(const Doms& d) const {
        if (trivially_false_) return false;
        Witness w = witness(d);
        for (const auto& c : cons_)
            if (!holds(*c.src, w)) return false;
        return true;
    }

    Witness witness(const Doms& d) const {
        Witness w;
        for (std::size_t i = 0; i < vars_.size(); ++i) w[vars_[i]] = d[i].lo;
        return w;
    }

    // Depth-first search for any total assignment; domains of the listed
    // prefix are already fixed by the caller when labeling.
    bool search(Doms& d, std::uint64_t& nodes) {
        if (++nodes > cfg_.node_budget) throw BudgetOut{};
        if (!propagate(d)) return false;
        int best = -1;
        std::int64_t best_size = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::int64_t size = d[i].hi - d[i].lo;
            if (size > 0 && (best < 0 || size < best_size)) {
                best = static_cast<int>(i);
                best_size = size;
            }
        }
        if (best < 0) return verify(d);
        Interval iv = d[best];
        if (best_size < 16) {
            for (std::int64_t v = iv.lo; v <= iv.hi; ++v) {
                Doms copy = d;
                copy[best] = Interval{v, v};
                if (search(copy, nodes)) {
                    d = copy;
                    return true;
                }
            }
            return false;
        }
        std::int64_t mid = iv.lo + (iv.hi - iv.lo) / 2;
        Doms left = d;
        left[best].hi = mid;
        if (search(left, nodes)) {
            d = left;
            return true;
        }
        Doms right = d;
        right[best].lo = mid + 1;
        if (search(right, nodes)) {
            d = right;
            return true;
        }
        return false;
    }

    int compile(const TermPtr& t) {
        ENode n;
        switch (t->kind) {
            case TermKind::Int:
                n.k = ENode::Const;
                n.c = t->value;
                break;
            case TermKind::Var:
                n.k = ENode::Var;
                n.var = ensure_var(t->var_id());
                break;
            case TermKind::Arith:
                n.a = compile(t->args[0]);
                if (t->op == ArithOp::Abs) {
                    n.k = ENode::Abs;
                } else {
                    n.b = compile(t->args[1]);
                    n.k = t->op == ArithOp::Add ? ENode::Add : (t->op == ArithOp::Sub ? ENode::Sub : ENode::Mul);
                }
                break;
            default:
                throw std::invalid_argument("ill-typed constraint term " + to_string(t));
        }
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size()) - 1;
    }

    Interval forward(int i, const Doms& d) {
        const ENode& n = nodes_[i];
        Interval r;
        switch (n.k) {
            case ENode::Const: r = {n.c, n.c}; break;
            case ENode::Var: r = d[n.var]; break;
            case ENode::Add: {
                Interval a = forward(n.a, d), b = forward(n.b, d);
                r = {clamp(i128(a.lo) + b.lo), clamp(i128(a.hi) + b.hi)};
                break;
            }
            case ENode::Sub: {
                Interval a = forward(n.a, d), b = forward(n.b, d);
                r = {clamp(i128(a.lo) - b.hi), clamp(i128(a.hi) - b.lo)};
                break;
            }
            case ENode::Mul: {
                Interval a = forward(n.a, d), b = forward(n.b, d);
                i128 p[4] = {i128(a.lo) * b.lo, i128(a.lo) * b.hi, i128(a.hi) * b.lo, i128(a.hi) * b.hi};
                r = {clamp(*std::min_element(p, p + 4)), clamp(*std::max_element(p, p + 4))};
                if (n.a >= 0 && n.b >= 0 && same_var(n.a, n.b) && r.lo < 0) r.lo = 0;
                break;
            }
            case ENode::Abs: {
                Interval a = forward(n.a, d);
                if (a.lo >= 0)
                    r = a;
                else if (a.hi <= 0)
                    r = {-a.hi, -a.lo};
                else
                    r = {0, std::max(-a.lo, a.hi)};
                break;
            }
        }
        val_[i] = r;
        return r;
    }

    bool same_var(int a, int b) const {
        return nodes_[a].k == ENode::Var && nodes_[b].k == ENode::Var && nodes_[a].var == nodes_[b].var;
    }

    bool narrow(int i, Interval t, Doms& d) {
        const ENode& n = nodes_[i];
        Interval cur = val_[i];
        t.lo = std::max(t.lo, cur.lo);
        t.hi = std::min(t.hi, cur.hi);
        if (t.lo > t.hi) return false;
        switch (n.k) {
            case ENode::Const:
                return true;
            case ENode::Var: {
                Interval& v = d[n.var];
                if (t.lo > v.lo || t.hi < v.hi) {
                    v.lo = std::max(v.lo, t.lo);
                    v.hi = std::min(v.hi, t.hi);
                    changed_ = true;
                }
                return v.lo <= v.hi;
            }
            case ENode::Add: {
                Interval b = val_[n.b];
                if (!narrow(n.a, {clamp(i128(t.lo) - b.hi), clamp(i128(t.hi) - b.lo)}, d)) return false;
                Interval a = forward(n.a, d);
                return narrow(n.b, {clamp(i128(t.lo) - a.hi), clamp(i128(t.hi) - a.lo)}, d);
            }
            case ENode::Sub: {
                Interval b = val_[n.b];
                if (!narrow(n.a, {clamp(i128(t.lo) + b.lo), clamp(i128(t.hi) + b.hi)}, d)) return false;
                Interval a = forward(n.a, d);
                return narrow(n.b, {clamp(i128(a.lo) - t.hi), clamp(i128(a.hi) - t.lo)}, d);
            }
            case ENode::Mul: {
                if (!div_narrow(n.a, t, val_[n.b], d)) return false;
                return div_narrow(n.b, t, forward(n.a, d), d);
            }
            case ENode::Abs: {
                Interval a = val_[n.a];
                Interval target{-t.hi, t.hi};
                if (t.lo > 0) {
                    if (a.lo > -t.lo) target = {t.lo, t.hi};
                    else if (a.hi < t.lo) target = {-t.hi, -t.lo};
                }
                return narrow(n.a, target, d);
            }
        }
        return true;
    }

    // Narrows x given x * y in t and y in the interval yv.
    bool div_narrow(int x, Interval t, Interval yv, Doms& d) {
        if (yv.lo <= 0 && yv.hi >= 0) return true;
        i128 q[4] = {i128(t.lo), i128(t.lo), i128(t.hi), i128(t.hi)};
        i128 den[4] = {yv.lo, yv.hi, yv.lo, yv.hi};
        i128 lo = 0, hi = 0;
        for (int k = 0; k < 4; ++k) {
            i128 f = floor_div(q[k], den[k]);
            i128 c = ceil_div(q[k], den[k]);
            if (k == 0 || f < lo) lo = f;
            if (k == 0 || c > hi) hi = c;
        }
        return narrow(x, {clamp(lo), clamp(hi)}, d);
    }

    bool revise(const Con& c, Doms& d) {
        Interval l = forward(c.lhs, d);
        Interval r = forward(c.rhs, d);
        switch (c.op) {
            case CmpOp::Eq: {
                Interval t{std::max(l.lo, r.lo), std::min(l.hi, r.hi)};
                if (t.lo > t.hi) return false;
                return narrow(c.lhs, t, d) && (forward(c.rhs, d), narrow(c.rhs, t, d));
            }
            case CmpOp::Ne: {
                if (l.lo == l.hi && r.lo == r.hi) return l.lo != r.lo;
                if (l.lo == l.hi) {
                    if (r.lo == l.lo) return narrow(c.rhs, {r.lo + 1, r.hi}, d);
                    if (r.hi == l.lo) return narrow(c.rhs, {r.lo, r.hi - 1}, d);
                } else if (r.lo == r.hi) {
                    if (l.lo == r.lo) return narrow(c.lhs, {l.lo + 1, l.hi}, d);
                    if (l.hi == r.lo) return narrow(c.lhs, {l.lo, l.hi - 1}, d);
                }
                return true;
            }
            case CmpOp::Lt:
                return less(c.lhs, l, c.rhs, r, 1, d);
            case CmpOp::Le:
                return less(c.lhs, l, c.rhs, r, 0, d);
            case CmpOp::Gt:
                return less(c.rhs, r, c.lhs, l, 1, d);
            case CmpOp::Ge:
                return less(c.rhs, r, c.lhs, l, 0, d);
        }
        return true;
    }

    // Enforces a + gap <= b.
    bool less(int a, Interval av, int b, Interval bv, std::int64_t gap, Doms& d) {
        if (i128(av.lo) + gap > bv.hi) return false;
        if (!narrow(a, {av.lo, clamp(i128(bv.hi) - gap)}, d)) return false;
        av = forward(a, d);
        forward(b, d);
        return narrow(b, {clamp(i128(av.lo) + gap), bv.hi}, d);
    }

    SolverConfig cfg_;
    std::vector<ENode> nodes_;
    std::vector<Interval> val_;
    std::vector<Con> cons_;
    std::vector<VarId> vars_;
    std::map<VarId, int> index_;
    Doms init_;
    bool changed_ = false;
    bool trivially_false_ = false;
};

}  // namespace

SatResult check_sat(const ConstraintStore& store, const SolverConfig& cfg) {
    SatResult res;
    std::string why = ill_typed_reason(store.constraints);
    if (!why.empty()) {
        res.kind = SatResult::IllTyped;
        res.diagnostic = why;
        return res;
    }
    Problem p(store.constraints, store.domains, cfg);
    Doms d = p.initial();
    std::uint64_t nodes = 0;
    try {
        if (p.search(d, nodes)) {
            res.kind = SatResult::Sat;
            res.witness = p.witness(d);
        } else {
            res.kind = SatResult::Unsat;
        }
    } catch (const BudgetOut&) {
        res.kind = SatResult::BudgetExceeded;
        res.diagnostic = "solver node budget exhausted";
    }
    return res;
}

SatResult check_sat(const std::vector<CAtom>& atoms, const SolverConfig& cfg) {
    ConstraintStore s;
    s.constraints = atoms;
    return check_sat(s, cfg);
}

bool propagate_consistent(const std::vector<CAtom>& atoms, const SolverConfig& cfg) {
    if (!ill_typed_reason(atoms).empty()) return false;
    Problem p(atoms, {}, cfg);
    Doms d = p.initial();
    return p.propagate(d);
}

bool label(const ConstraintStore& store, const std::vector<VarId>& vars, const SolverConfig& cfg,
           const std::function<bool(const Witness&)>& emit) {
    if (!ill_typed_reason(store.constraints).empty()) return true;
    Problem p(store.constraints, store.domains, cfg);
    std::vector<int> order;
    for (VarId v : vars) {
        int i = p.ensure_var(v);
        auto it = store.domains.find(v);
        if (it != store.domains.end()) p.init_[i] = it->second;
        order.push_back(i);
    }
    p.val_.resize(p.nodes_.size());
    std::uint64_t nodes = 0;
    bool stop = false;
    std::function<void(std::size_t, Doms)> rec = [&](std::size_t k, Doms d) {
        if (stop) return;
        if (++nodes > cfg.node_budget) throw BudgetOut{};
        if (!p.propagate(d)) return;
        if (k == order.size()) {
            Doms full = d;
            if (p.search(full, nodes)) {
                if (!emit(p.witness(full))) stop = true;
            }
            return;
        }
        Interval iv = d[order[k]];
        for (std::int64_t v = iv.lo; v <= iv.hi && !stop; ++v) {
            Doms copy = d;
            copy[order[k]] = Interval{v, v};
            rec(k + 1, std::move(copy));
        }
    };
    try {
        rec(0, p.initial());
    } catch (const BudgetOut&) {
        return false;
    }
    return true;
}

}  // namespace ciff
