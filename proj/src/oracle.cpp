#include "ciff/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "ciff/allowedness.hpp"
#include "ciff/completion.hpp"

namespace ciff {

Truth kleene_not(Truth t) { return static_cast<Truth>(2 - static_cast<int>(t)); }
Truth kleene_and(Truth a, Truth b) { return std::min(a, b); }
Truth kleene_or(Truth a, Truth b) { return std::max(a, b); }

const char* truth_name(Truth t) {
    switch (t) {
        case Truth::False: return "false";
        case Truth::Undefined: return "undefined";
        case Truth::True: return "true";
    }
    return "undefined";
}

const char* verdict_name(OracleVerdict::Kind k) {
    switch (k) {
        case OracleVerdict::Valid: return "valid";
        case OracleVerdict::Invalid: return "invalid";
        case OracleVerdict::Inapplicable: return "inapplicable";
    }
    return "inapplicable";
}

bool Interpretation::two_valued() const {
    for (const auto& [k, t] : truth)
        if (t == Truth::Undefined) return false;
    return true;
}

std::string atom_key(const Atom& a) { return to_string(a); }

namespace {

std::optional<std::int64_t> arith(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Int: return t->value;
        case TermKind::Arith: {
            std::vector<std::int64_t> xs;
            for (const auto& a : t->args) {
                auto v = arith(a);
                if (!v) return std::nullopt;
                xs.push_back(*v);
            }
            switch (t->op) {
                case ArithOp::Add: return xs.at(0) + xs.at(1);
                case ArithOp::Sub: return xs.size() == 1 ? -xs[0] : xs.at(0) - xs.at(1);
                case ArithOp::Mul: return xs.at(0) * xs.at(1);
                case ArithOp::Abs: return xs.at(0) < 0 ? -xs[0] : xs[0];
            }
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

Truth of(bool b) { return b ? Truth::True : Truth::False; }

void collect_constants(const TermPtr& t, std::vector<TermPtr>& out) {
    if (t->kind == TermKind::Const || t->kind == TermKind::Int) {
        out.push_back(t);
        return;
    }
    for (const auto& a : t->args) collect_constants(a, out);
}

void constants_of(const Atom& a, std::vector<TermPtr>& out) {
    if (a.kind == AtomKind::Constraint) return;
    for (const auto& t : a.args) collect_constants(t, out);
}

// Calls `f` for every assignment of `vars` over `u`.
void for_each_assignment(const std::vector<VarId>& vars, const std::vector<TermPtr>& u, Substitution& s,
                         const std::function<bool(const Substitution&)>& f, std::size_t k = 0) {
    if (k == vars.size()) {
        f(s);
        return;
    }
    for (const auto& v : u) {
        s[vars[k]] = v;
        for_each_assignment(vars, u, s, f, k + 1);
    }
    s.erase(vars[k]);
}

// Early-exit enumeration; returns true if `f` asked to stop.
bool any_assignment(const std::vector<VarId>& vars, const std::vector<TermPtr>& u, Substitution& s,
                    const std::function<bool(const Substitution&)>& f, std::size_t k = 0) {
    if (k == vars.size()) return f(s);
    for (const auto& v : u) {
        s[vars[k]] = v;
        if (any_assignment(vars, u, s, f, k + 1)) {
            s.erase(vars[k]);
            return true;
        }
    }
    s.erase(vars[k]);
    return false;
}

std::vector<VarId> vars_of(const std::vector<Literal>& ls, const std::vector<Atom>& as = {}) {
    std::vector<VarId> out;
    for (const auto& l : ls) collect_vars_ordered(l.atom, out);
    for (const auto& a : as) collect_vars_ordered(a, out);
    std::vector<VarId> uniq;
    std::set<VarId> seen;
    for (VarId v : out)
        if (seen.insert(v).second) uniq.push_back(v);
    return uniq;
}

std::size_t power(std::size_t b, std::size_t e, std::size_t cap) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
        r *= b;
        if (r > cap) return cap + 1;
    }
    return r;
}

}  // namespace

GroundFramework::GroundFramework(const Program& p, const Query& q, const OracleOptions& opts,
                                 const std::vector<TermPtr>& extra)
    : program_(p), query_(q), opts_(opts) {
    std::vector<TermPtr> cs;
    for (const auto& c : p.clauses) {
        constants_of(c.head, cs);
        for (const auto& l : c.body) constants_of(l.atom, cs);
    }
    for (const auto& ic : p.ics) {
        for (const auto& l : ic.body) constants_of(l.atom, cs);
        for (const auto& a : ic.head) constants_of(a, cs);
    }
    for (const auto& l : q.conjuncts) constants_of(l.atom, cs);
    for (std::int64_t i = opts.lo; i <= opts.hi; ++i) cs.push_back(make_int(i));
    for (std::size_t i = 0; i < opts.fresh_constants; ++i) cs.push_back(make_const("sk_0" + std::string(i, '0')));
    for (const auto& e : extra) collect_constants(e, cs);
    std::sort(cs.begin(), cs.end(), [](const TermPtr& a, const TermPtr& b) { return term_compare(a, b) < 0; });
    for (const auto& c : cs)
        if (universe_.empty() || !term_equal(universe_.back(), c)) universe_.push_back(c);

    std::set<Pred> defined;
    for (const auto& pr : user_predicates(p))
        if (!p.abducibles.count(pr)) defined.insert(pr);
    for (const auto& pr : user_predicates(q))
        if (!p.abducibles.count(pr)) defined.insert(pr);
    for (const auto& pr : defined) {
        std::vector<TermPtr> args(pr.arity);
        std::function<void(std::size_t)> fill = [&](std::size_t k) {
            if (k == pr.arity) {
                base_.push_back(make_user_atom(pr.name, args));
                return;
            }
            for (const auto& u : universe_) {
                args[k] = u;
                fill(k + 1);
            }
        };
        fill(0);
    }
    for (const auto& a : base_) bodies_[atom_key(a)];

    std::size_t instances = 0;
    for (const auto& c : p.clauses) {
        std::vector<VarId> vs = vars_of(c.body, {c.head});
        instances += power(universe_.size(), vs.size(), opts.max_instances);
        if (instances > opts.max_instances) throw BoundExceeded("too many ground clause instances");
        Substitution s;
        for_each_assignment(vs, universe_, s, [&](const Substitution& sub) {
            Atom h = substitute(c.head, sub);
            std::vector<Literal> body;
            for (const auto& l : c.body) body.push_back(Literal{substitute(l.atom, sub), l.positive});
            auto it = bodies_.find(atom_key(h));
            if (it != bodies_.end()) it->second.push_back(std::move(body));
            return false;
        });
    }
}

std::vector<Atom> GroundFramework::abducible_base() const {
    std::vector<Atom> out;
    for (const auto& pr : program_.abducibles) {
        std::vector<TermPtr> args(pr.arity);
        std::function<void(std::size_t)> fill = [&](std::size_t k) {
            if (k == pr.arity) {
                out.push_back(make_user_atom(pr.name, args, AtomKind::Abducible));
                return;
            }
            for (const auto& u : universe_) {
                args[k] = u;
                fill(k + 1);
            }
        };
        fill(0);
    }
    return out;
}

Truth GroundFramework::eval(const Atom& a, const Interpretation& I, const Delta& delta) const {
    switch (a.kind) {
        case AtomKind::Truth: return of(a.is_true());
        case AtomKind::Abducible: return of(delta.count(atom_key(a)) > 0);
        case AtomKind::Defined: {
            if (!is_ground(a)) throw NotGround("atom " + to_string(a) + " is not ground");
            auto it = I.truth.find(atom_key(a));
            return it == I.truth.end() ? Truth::False : it->second;
        }
        case AtomKind::Equality: {
            if (!is_ground(a)) throw NotGround("atom " + to_string(a) + " is not ground");
            auto l = arith(a.args[0]), r = arith(a.args[1]);
            if (l && r) return of(*l == *r);
            return of(term_equal(a.args[0], a.args[1]));
        }
        case AtomKind::Constraint: {
            if (!is_ground(a)) throw NotGround("atom " + to_string(a) + " is not ground");
            auto l = arith(a.args[0]), r = arith(a.args[1]);
            if (!l || !r) return Truth::False;
            switch (a.op) {
                case CmpOp::Eq: return of(*l == *r);
                case CmpOp::Ne: return of(*l != *r);
                case CmpOp::Lt: return of(*l < *r);
                case CmpOp::Le: return of(*l <= *r);
                case CmpOp::Gt: return of(*l > *r);
                case CmpOp::Ge: return of(*l >= *r);
            }
        }
    }
    return Truth::Undefined;
}

Truth GroundFramework::eval(const Literal& l, const Interpretation& I, const Delta& delta) const {
    Truth t = eval(l.atom, I, delta);
    return l.positive ? t : kleene_not(t);
}

Interpretation GroundFramework::fixpoint(const Delta& delta) const {
    Interpretation I;
    for (const auto& a : base_) I.truth[atom_key(a)] = Truth::Undefined;
    for (bool changed = true; changed;) {
        changed = false;
        Interpretation next = I;
        for (const auto& [key, bodies] : bodies_) {
            Truth v = Truth::False;
            for (const auto& b : bodies) {
                Truth c = Truth::True;
                for (const auto& l : b) {
                    c = kleene_and(c, eval(l, I, delta));
                    if (c == Truth::False) break;
                }
                v = kleene_or(v, c);
                if (v == Truth::True) break;
            }
            if (next.truth[key] != v) {
                next.truth[key] = v;
                changed = true;
            }
        }
        I = std::move(next);
    }
    return I;
}

Truth GroundFramework::query_truth(const Substitution& sigma, const Interpretation& I, const Delta& delta) const {
    std::vector<Literal> ls;
    for (const auto& l : query_.conjuncts) ls.push_back(Literal{substitute(l.atom, sigma), l.positive});
    Truth best = Truth::False;
    Substitution s;
    any_assignment(vars_of(ls), universe_, s, [&](const Substitution& sub) {
        Truth c = Truth::True;
        for (const auto& l : ls) c = kleene_and(c, eval(Literal{substitute(l.atom, sub), l.positive}, I, delta));
        best = kleene_or(best, c);
        return best == Truth::True;
    });
    return best;
}

Truth GroundFramework::ic_truth(const Interpretation& I, const Delta& delta) const {
    Truth all = Truth::True;
    for (const auto& ic : program_.ics) {
        Substitution s;
        any_assignment(vars_of(ic.body, ic.head), universe_, s, [&](const Substitution& sub) {
            Truth body = Truth::True;
            for (const auto& l : ic.body) body = kleene_and(body, eval(Literal{substitute(l.atom, sub), l.positive}, I, delta));
            Truth head = Truth::False;
            for (const auto& a : ic.head) head = kleene_or(head, eval(substitute(a, sub), I, delta));
            all = kleene_and(all, kleene_or(kleene_not(body), head));
            return all == Truth::False;
        });
        if (all == Truth::False) break;
    }
    return all;
}

namespace {

struct NodeEval {
    const GroundFramework& g;
    const Interpretation& I;
    const Delta& delta;

    Truth atom(const Atom& a, const Substitution& s) const { return g.eval(substitute(a, s), I, delta); }

    Truth implication(const Conjunct& c, const std::set<VarId>& bound, Substitution& s) const {
        std::set<VarId> vs;
        collect_vars(c, vs);
        std::vector<VarId> free;
        for (VarId v : vs)
            if (!bound.count(v) && !s.count(v)) free.push_back(v);
        Truth all = Truth::True;
        any_assignment(free, g.universe(), s, [&](const Substitution& sub) {
            Truth body = Truth::True;
            for (const auto& l : c.body) {
                Truth t = atom(l.atom, sub);
                body = kleene_and(body, l.positive ? t : kleene_not(t));
            }
            Truth head = Truth::False;
            for (const auto& h : c.head) head = kleene_or(head, atom(h, sub));
            all = kleene_and(all, kleene_or(kleene_not(body), head));
            return all == Truth::False;
        });
        return all;
    }

    Truth conjunction(const std::vector<Conjunct>& cs, const std::set<VarId>& bound, Substitution& s) const {
        Truth t = Truth::True;
        for (const auto& c : cs) {
            switch (c.kind) {
                case ConjunctKind::Atomic: t = kleene_and(t, atom(c.atom, s)); break;
                case ConjunctKind::Implicative: t = kleene_and(t, implication(c, bound, s)); break;
                case ConjunctKind::Disjunctive: {
                    Truth d = Truth::False;
                    for (const auto& x : c.disjuncts) d = kleene_or(d, conjunction(x, bound, s));
                    t = kleene_and(t, d);
                    break;
                }
            }
            if (t == Truth::False) break;
        }
        return t;
    }

    Truth node(const Node& n) const {
        std::set<VarId> ex = existential_vars(n);
        std::vector<VarId> vs(ex.begin(), ex.end());
        Truth best = Truth::False;
        Substitution s;
        any_assignment(vs, g.universe(), s, [&](const Substitution& sub) {
            Substitution local = sub;
            best = kleene_or(best, conjunction(n.conjuncts, ex, local));
            return best == Truth::True;
        });
        return best;
    }
};

}  // namespace

Truth GroundFramework::node_truth(const Node& n, const Interpretation& I, const Delta& delta) const {
    return NodeEval{*this, I, delta}.node(n);
}

Truth GroundFramework::formula_truth(const std::vector<Node>& nodes, const Interpretation& I,
                                     const Delta& delta) const {
    Truth t = Truth::False;
    for (const auto& n : nodes) t = kleene_or(t, node_truth(n, I, delta));
    return t;
}

Interpretation fitting_fixpoint(const Program& ground, const std::vector<Atom>& delta) {
    for (const auto& c : ground.clauses) {
        if (!is_ground(c.head)) throw NotGround("clause head " + to_string(c.head) + " is not ground");
        for (const auto& l : c.body)
            if (!is_ground(l.atom)) throw NotGround("body atom " + to_string(l.atom) + " is not ground");
    }
    OracleOptions opts;
    opts.lo = 1;
    opts.hi = 0;
    opts.fresh_constants = 0;
    GroundFramework g(ground, Query{}, opts);
    Delta d;
    for (const auto& a : delta) d.insert(atom_key(a));
    return g.fixpoint(d);
}

OracleVerdict check_abductive_answer(const Program& p, const Query& q, const std::vector<Atom>& delta,
                                     const Substitution& sigma, const OracleOptions& opts) {
    std::vector<TermPtr> extra;
    for (const auto& a : delta) {
        if (!is_ground(a)) return {OracleVerdict::Inapplicable, "abducible " + to_string(a) + " is not ground"};
        for (const auto& t : a.args) extra.push_back(t);
    }
    for (const auto& [v, t] : sigma) extra.push_back(t);
    GroundFramework g(p, q, opts, extra);
    Delta d;
    for (const auto& a : delta) d.insert(atom_key(a));
    Interpretation I = g.fixpoint(d);
    Truth qt = g.query_truth(sigma, I, d);
    Truth it = g.ic_truth(I, d);
    if (qt == Truth::False) return {OracleVerdict::Invalid, "the query is false"};
    if (it == Truth::False) return {OracleVerdict::Invalid, "an integrity constraint is violated"};
    if (qt == Truth::Undefined) return {OracleVerdict::Inapplicable, "the query is undefined"};
    if (it == Truth::Undefined) return {OracleVerdict::Inapplicable, "an integrity constraint is undefined"};
    return {OracleVerdict::Valid, {}};
}

Enumeration enumerate_answers(const Program& p, const Query& q, const OracleOptions& opts, std::size_t limit) {
    GroundFramework g(p, q, opts);
    std::vector<Atom> base = g.abducible_base();
    if (base.size() > opts.max_base)
        throw BoundExceeded("abducible base has " + std::to_string(base.size()) + " atoms");
    Enumeration e;
    e.base_size = base.size();
    const std::uint64_t n = std::uint64_t(1) << base.size();
    for (std::uint64_t mask = 0; mask < n && e.answers.size() < limit; ++mask) {
        Delta d;
        std::vector<Atom> chosen;
        for (std::size_t i = 0; i < base.size(); ++i)
            if (mask >> i & 1) {
                d.insert(atom_key(base[i]));
                chosen.push_back(base[i]);
            }
        Interpretation I = g.fixpoint(d);
        if (!I.two_valued()) e.two_valued = false;
        if (g.query_truth({}, I, d) == Truth::True && g.ic_truth(I, d) == Truth::True) e.answers.push_back(chosen);
    }
    return e;
}

std::vector<std::vector<Atom>> minimal_answers(const std::vector<std::vector<Atom>>& answers) {
    auto keys = [](const std::vector<Atom>& as) {
        std::set<std::string> s;
        for (const auto& a : as) s.insert(atom_key(a));
        return s;
    };
    std::vector<std::vector<Atom>> out;
    for (const auto& a : answers) {
        auto ka = keys(a);
        bool minimal = true;
        for (const auto& b : answers) {
            auto kb = keys(b);
            if (kb.size() < ka.size() && std::includes(ka.begin(), ka.end(), kb.begin(), kb.end())) {
                minimal = false;
                break;
            }
        }
        if (minimal) out.push_back(a);
    }
    return out;
}

namespace {

class Gen {
public:
    Gen(std::uint64_t seed, const RandomOptions& o) : rng_(seed), o_(o) {}

    RandomFramework make() {
        for (int i = 0; i < o_.defined; ++i) defined_.push_back({"p" + std::to_string(i), pick(0, 1)});
        for (int i = 0; i < o_.abducibles; ++i) abducibles_.push_back({"a" + std::to_string(i), pick(0, 1)});
        if (pick(0, 3) == 0) defined_[0].second = 2;

        std::string src;
        for (const auto& [name, ar] : abducibles_)
            src += "abducible(" + name + (ar ? "(_)" : "") + ").\n";
        for (const auto& [name, ar] : defined_) {
            int clauses = pick(0, 2);
            for (int c = 0; c < clauses; ++c) src += clause(name, ar);
        }
        int ics = pick(0, 2);
        for (int i = 0; i < ics; ++i) src += ic();
        return {src, query()};
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    std::string constant() { return std::to_string(pick(0, 2)); }

    std::string args(int arity, std::vector<std::string>& vars, bool fresh_ok) {
        if (arity == 0) return "";
        std::string out = "(";
        for (int k = 0; k < arity; ++k) {
            if (k) out += ",";
            out += term(vars, fresh_ok);
        }
        return out + ")";
    }

    std::string term(std::vector<std::string>& vars, bool fresh_ok) {
        if (o_.ground || pick(0, 2) == 0 || (vars.empty() && !fresh_ok)) return constant();
        if (fresh_ok && (vars.empty() || pick(0, 2) == 0)) {
            vars.push_back("X" + std::to_string(vars.size()));
            return vars.back();
        }
        return vars[pick(0, static_cast<int>(vars.size()) - 1)];
    }

    std::string user_atom(std::vector<std::string>& vars, bool fresh_ok) {
        bool abd = !abducibles_.empty() && pick(0, 1) == 0;
        const auto& [name, ar] = abd ? abducibles_[pick(0, static_cast<int>(abducibles_.size()) - 1)]
                                     : defined_[pick(0, static_cast<int>(defined_.size()) - 1)];
        return name + args(ar, vars, fresh_ok);
    }

    // A literal over already bound variables: negation, equality or constraint.
    std::string guard(std::vector<std::string>& vars) {
        int kind = pick(0, 3);
        if (kind == 0 || vars.empty()) return "not(" + user_atom(vars, false) + ")";
        const std::string& v = vars[pick(0, static_cast<int>(vars.size()) - 1)];
        if (kind == 1) return v + " \\== " + term(vars, false);
        if (kind == 2 || !o_.constraints) return v + " = " + term(vars, false);
        static const char* ops[] = {"#<", "#=<", "#>", "#>=", "#=", "#\\="};
        return v + " " + ops[pick(0, 5)] + " " + constant();
    }

    std::string clause(const std::string& name, int arity) {
        std::vector<std::string> vars;
        std::string head = name + args(arity, vars, true);
        std::vector<std::string> body;
        int n = pick(0, 3);
        for (int i = 0; i < n; ++i) body.push_back(pick(0, 2) ? user_atom(vars, true) : guard(vars));
        std::string out = head;
        if (!body.empty()) out += " :- " + join(body);
        return out + ".\n";
    }

    std::string ic() {
        std::vector<std::string> vars;
        std::vector<std::string> body{user_atom(vars, true)};
        int n = pick(0, 2);
        for (int i = 0; i < n; ++i) body.push_back(pick(0, 1) ? user_atom(vars, true) : guard(vars));
        std::string head = "false";
        if (pick(0, 1)) {
            std::vector<std::string> hs{user_atom(vars, false)};
            if (pick(0, 3) == 0) hs.push_back(user_atom(vars, false));
            head = join(hs);
        }
        return "[" + join(body) + "] implies [" + head + "].\n";
    }

    std::string query() {
        std::vector<std::string> vars;
        std::vector<std::string> ls{user_atom(vars, true)};
        if (pick(0, 1)) ls.push_back(pick(0, 2) ? user_atom(vars, true) : guard(vars));
        return join(ls);
    }

    static std::string join(const std::vector<std::string>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
        return out;
    }

    std::mt19937_64 rng_;
    RandomOptions o_;
    std::vector<std::pair<std::string, int>> defined_, abducibles_;
};

}  // namespace

RandomFramework random_framework(std::uint64_t seed, const RandomOptions& opts) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        RandomFramework f = Gen(seed * 1000003 + attempt, opts).make();
        if (!opts.statically_allowed) return f;
        Program p = parse_program(f.program);
        Query q = parse_query(f.query, p.abducibles);
        std::set<Pred> extra = user_predicates(q);
        CiffTheory th = complete(p, extra);
        if (check_statically_allowed(th, q).verdict != Verdict::NotAllowed) return f;
    }
}

}  // namespace ciff
