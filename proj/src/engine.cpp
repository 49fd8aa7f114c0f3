#include "ciff/engine.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "ciff/unification.hpp"

namespace ciff {

std::string rule_name(int rule) { return rule == kInit ? "Init" : "R" + std::to_string(rule); }

const char* status_name(DerivationResult::Status s) {
    switch (s) {
        case DerivationResult::Success: return "success";
        case DerivationResult::Failure: return "failure";
        case DerivationResult::Undefined: return "undefined";
        case DerivationResult::BudgetExhausted: return "budget_exhausted";
    }
    return "failure";
}

std::vector<const Node*> DerivationResult::successes() const {
    std::vector<const Node*> out;
    for (const auto& l : leaves)
        if (l.status == LeafStatus::Success) out.push_back(&l.node);
    return out;
}

namespace {

bool var_or_int(const TermPtr& t) { return t->is_var() || t->kind == TermKind::Int; }

bool basic_form(const Atom& a) {
    if (a.kind == AtomKind::Constraint) return true;
    if (a.kind != AtomKind::Equality) return false;
    const TermPtr& l = a.args[0];
    const TermPtr& r = a.args[1];
    return var_or_int(l) && var_or_int(r) && !(l->is_var() && r->is_var());
}

bool is_c(const Atom& a, const std::set<VarId>& cvars) {
    CAtomClass k = classify_c_atom(a, cvars);
    return k == CAtomClass::BasicCAtom || k == CAtomClass::CAtom;
}

bool subset_of(const std::set<VarId>& a, const std::set<VarId>& b) {
    for (VarId v : a)
        if (!b.count(v)) return false;
    return true;
}

}  // namespace

CAtomClass classify_c_atom(const Atom& a, const std::set<VarId>& cvars) {
    if (a.kind == AtomKind::Constraint) return CAtomClass::BasicCAtom;
    if (a.kind != AtomKind::Equality) return CAtomClass::NotC;
    if (basic_form(a)) return CAtomClass::BasicCAtom;
    std::set<VarId> vs;
    collect_vars(a, vs);
    if (!vs.empty() && subset_of(vs, cvars)) return CAtomClass::CAtom;
    return CAtomClass::HerbrandEquality;
}

std::set<VarId> constraint_vars(const Node& n) {
    std::set<VarId> out;
    for (const auto& c : n.conjuncts)
        if (c.is_atomic() && basic_form(c.atom)) collect_vars(c.atom, out);
    return out;
}

CAtom to_catom(const Atom& a) {
    if (a.kind == AtomKind::Constraint) return CAtom{a.op, a.args[0], a.args[1]};
    return CAtom{CmpOp::Eq, a.args[0], a.args[1]};
}

std::vector<CAtom> c_conjuncts(const Node& n) {
    std::set<VarId> cv = constraint_vars(n);
    std::vector<CAtom> out;
    for (const auto& c : n.conjuncts)
        if (c.is_atomic() && is_c(c.atom, cv)) out.push_back(to_catom(c.atom));
    return out;
}

std::vector<std::string> check_quantifiers(const Node& n) {
    std::vector<std::string> out;
    std::set<VarId> ex = existential_vars(n);
    std::map<VarId, ConjunctId> owner;
    for (const auto& c : n.conjuncts) {
        if (!c.is_implication()) continue;
        std::set<VarId> vs;
        collect_vars(c, vs);
        for (VarId v : vs) {
            if (ex.count(v)) continue;
            auto [it, fresh] = owner.emplace(v, c.id);
            if (!fresh && it->second != c.id)
                out.push_back("universal variable " + std::to_string(v) + " shared by implications " +
                              std::to_string(it->second) + " and " + std::to_string(c.id));
        }
    }
    return out;
}

namespace {

struct Fresh {
    VarId var = 0;
    ConjunctId id = 0;
    ConjunctId next() { return ++id; }
};

// Per-node facts shared by all rule tests of one selection.
struct Info {
    std::set<VarId> exist;
    std::set<VarId> cvars;
    std::unordered_map<VarId, int> occ;  // number of conjuncts mentioning a variable

    bool universal(VarId v) const { return !exist.count(v); }
};

Info analyse(const Node& n) {
    Info in;
    for (const auto& c : n.conjuncts) {
        std::set<VarId> vs;
        collect_vars(c, vs);
        for (VarId v : vs) ++in.occ[v];
        if (!c.is_implication()) in.exist.insert(vs.begin(), vs.end());
        if (c.is_atomic() && basic_form(c.atom)) in.cvars.insert(vs.begin(), vs.end());
    }
    return in;
}

Literal pos(Atom a) { return Literal{std::move(a), true}; }

bool body_is_true(const Conjunct& c) {
    for (const auto& l : c.body)
        if (!(l.positive && l.atom.is_true())) return false;
    return true;
}

bool head_closed(const Conjunct& c, const Info& in) {
    for (const auto& a : c.head) {
        std::set<VarId> vs;
        collect_vars(a, vs);
        for (VarId v : vs)
            if (in.universal(v)) return false;
    }
    return true;
}

UniversalTest universal_test(const Info& in) {
    return [&in](VarId v) { return in.universal(v); };
}

Conjunct rename_conjunct(const Conjunct& c, Renamer& r) {
    Conjunct out = c;
    switch (c.kind) {
        case ConjunctKind::Atomic:
            out.atom = rename(c.atom, r);
            break;
        case ConjunctKind::Implicative:
            for (auto& l : out.body) l.atom = rename(l.atom, r);
            for (auto& a : out.head) a = rename(a, r);
            break;
        case ConjunctKind::Disjunctive:
            for (auto& d : out.disjuncts)
                for (auto& x : d) x = rename_conjunct(x, r);
            break;
    }
    return out;
}

// Gives the universal variables of a new implication ids used nowhere else.
Conjunct rename_apart(const Conjunct& imp, const std::set<VarId>& exist, Fresh& f) {
    std::set<VarId> vs, univ;
    collect_vars(imp, vs);
    for (VarId v : vs)
        if (!exist.count(v)) univ.insert(v);
    if (univ.empty()) return imp;
    Renamer r(&f.var);
    r.restrict_to(univ);
    return rename_conjunct(imp, r);
}

Atom equality_from(const Equation& e) { return make_equality(e.first, e.second); }

// Body literals replacing a rewritten equality.
std::vector<Literal> rewritten_literals(const EqRewriteOutcome& o) {
    switch (o.kind) {
        case RewriteKind::True: return {pos(make_true())};
        case RewriteKind::False: return {pos(make_false())};
        default: break;
    }
    std::vector<Literal> out;
    for (const auto& e : o.equations) out.push_back(pos(equality_from(e)));
    if (out.empty()) out.push_back(pos(make_true()));
    return out;
}

std::vector<std::int64_t> key(std::initializer_list<std::int64_t> xs) { return std::vector<std::int64_t>(xs); }

const Atom* first_user_atom(const Conjunct& imp, std::size_t& at) {
    for (std::size_t k = 0; k < imp.body.size(); ++k) {
        const Literal& l = imp.body[k];
        if (l.positive && l.atom.is_user()) {
            at = k;
            return &l.atom;
        }
    }
    return nullptr;
}

std::vector<std::int64_t> r10_key(const Node& n, std::size_t i) {
    VarId x = n.conjuncts[i].atom.args[0]->var_id();
    std::vector<std::int64_t> k{10, static_cast<std::int64_t>(n.conjuncts[i].id)};
    std::vector<std::int64_t> rest;
    for (std::size_t j = 0; j < n.conjuncts.size(); ++j) {
        if (j == i) continue;
        std::set<VarId> vs;
        collect_vars(n.conjuncts[j], vs);
        if (vs.count(x)) rest.push_back(static_cast<std::int64_t>(n.conjuncts[j].id));
    }
    std::sort(rest.begin(), rest.end());
    k.insert(k.end(), rest.begin(), rest.end());
    return k;
}

bool r10_applicable(const Node& n, std::size_t i, const Info& in) {
    const Conjunct& c = n.conjuncts[i];
    if (!c.is_atomic() || c.atom.kind != AtomKind::Equality) return false;
    const TermPtr& x = c.atom.args[0];
    const TermPtr& t = c.atom.args[1];
    if (!x->is_var() || occurs(x->var_id(), t) || !is_herbrand(t)) return false;
    auto it = in.occ.find(x->var_id());
    if (it == in.occ.end() || it->second < 2) return false;
    return !n.guard.count(r10_key(n, i));
}

bool r12_applicable(const Conjunct& c, std::size_t k, const Info& in) {
    const Literal& l = c.body[k];
    if (!l.positive || l.atom.kind != AtomKind::Equality) return false;
    const TermPtr& x = l.atom.args[0];
    const TermPtr& t = l.atom.args[1];
    if (!x->is_var()) return false;
    if (c.body.size() == 1 && c.head.size() == 1 && c.head[0].is_false()) return false;
    if (occurs(x->var_id(), t)) return false;
    if (in.universal(x->var_id())) return false;
    if (is_c(l.atom, in.cvars)) return false;
    if (t->is_var() && in.universal(t->var_id())) return false;
    return is_herbrand(t);
}

bool r6_applicable(const Literal& l, const Info& in) {
    if (!l.positive) return false;
    if (l.atom.kind != AtomKind::Constraint && l.atom.kind != AtomKind::Equality) return false;
    if (!is_c(l.atom, in.cvars)) return false;
    std::set<VarId> vs;
    collect_vars(l.atom, vs);
    return subset_of(vs, in.exist);
}

bool r18_applicable(const Conjunct& c) {
    if (!c.is_implication()) return false;
    if (body_is_true(c)) return true;
    for (const auto& l : c.body)
        if (!l.positive || l.atom.kind != AtomKind::Constraint) return false;
    return true;
}

}  // namespace

Engine::Engine(const CiffTheory& theory, EngineConfig cfg)
    : theory_(theory), cfg_(std::move(cfg)), next_var_(theory.max_var_id) {}

Node Engine::initial_node(const Query& q) {
    Node n;
    for (const auto& l : q.conjuncts) {
        std::set<VarId> vs;
        collect_vars(l.atom, vs);
        if (!vs.empty()) next_var_ = std::max(next_var_, *vs.rbegin());
    }
    Fresh f{next_var_, next_id_};
    for (const auto& l : q.conjuncts) {
        if (l.positive)
            n.conjuncts.push_back(make_atomic(f.next(), l.atom));
        else
            n.conjuncts.push_back(make_implication(f.next(), {pos(l.atom)}, {make_false()}));
    }
    std::set<VarId> exist = existential_vars(n);
    for (const auto& ic : theory_.ics) {
        Conjunct imp = make_implication(f.next(), ic.body, ic.head);
        n.conjuncts.push_back(rename_apart(imp, exist, f));
    }
    next_var_ = f.var;
    next_id_ = f.id;
    return n;
}

void Engine::scan(const Node& n, const std::function<bool(const Selection&)>& emit) const {
    if (n.failed() || n.undefined) return;
    const auto& cs = n.conjuncts;
    Info in = analyse(n);
    UniversalTest univ = universal_test(in);

    // R14-R17
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Conjunct& c = cs[i];
        if (c.is_atomic() && c.atom.is_true()) if (emit(Selection{14, i, 0, 0})) return;
        if (!c.is_implication()) continue;
        if (c.body.size() > 1)
            for (std::size_t k = 0; k < c.body.size(); ++k)
                if (c.body[k].positive && c.body[k].atom.is_true()) if (emit(Selection{15, i, 0, k})) return;
        for (std::size_t k = 0; k < c.body.size(); ++k)
            if (c.body[k].positive && c.body[k].atom.is_false()) if (emit(Selection{16, i, 0, k})) return;
        if (body_is_true(c) && head_closed(c, in)) if (emit(Selection{17, i, 0, 0})) return;
    }
    // R8, R9
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Conjunct& c = cs[i];
        if (c.is_atomic() && c.atom.kind == AtomKind::Equality) {
            if (n.guard.count(key({8, static_cast<std::int64_t>(c.id)}))) continue;
            if (rewrite_equality({c.atom.args[0], c.atom.args[1]}, univ).kind != RewriteKind::Unchanged)
                if (emit(Selection{8, i, 0, 0})) return;
        }
        if (c.is_implication()) {
            for (std::size_t k = 0; k < c.body.size(); ++k) {
                const Literal& l = c.body[k];
                if (!l.positive || l.atom.kind != AtomKind::Equality) continue;
                auto g = key({9, static_cast<std::int64_t>(c.id), static_cast<std::int64_t>(k)});
                if (n.guard.count(g)) continue;
                if (rewrite_equality({l.atom.args[0], l.atom.args[1]}, univ).kind != RewriteKind::Unchanged)
                    if (emit(Selection{9, i, 0, k})) return;
            }
        }
    }
    // R10, R11
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Conjunct& c = cs[i];
        if (c.is_atomic() && r10_applicable(n, i, in)) if (emit(Selection{10, i, 0, 0})) return;
        if (!c.is_implication()) continue;
        for (std::size_t k = 0; k < c.body.size(); ++k) {
            const Literal& l = c.body[k];
            if (!l.positive || l.atom.kind != AtomKind::Equality) continue;
            const TermPtr& x = l.atom.args[0];
            const TermPtr& t = l.atom.args[1];
            if (x->is_var() && in.universal(x->var_id()) && !occurs(x->var_id(), t) && is_herbrand(t))
                if (emit(Selection{11, i, 0, k})) return;
        }
    }
    // R13
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_implication()) continue;
        for (std::size_t k = 0; k < cs[i].body.size(); ++k)
            if (!cs[i].body[k].positive) if (emit(Selection{13, i, 0, k})) return;
    }
    // R1
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].is_atomic() && cs[i].atom.kind == AtomKind::Defined) if (emit(Selection{1, i, 0, 0})) return;
    // R2
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_implication()) continue;
        for (std::size_t k = 0; k < cs[i].body.size(); ++k)
            if (cs[i].body[k].positive && cs[i].body[k].atom.kind == AtomKind::Defined) if (emit(Selection{2, i, 0, k})) return;
    }
    // R6
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_implication()) continue;
        for (std::size_t k = 0; k < cs[i].body.size(); ++k)
            if (r6_applicable(cs[i].body[k], in)) if (emit(Selection{6, i, 0, k})) return;
    }
    // R12
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_implication()) continue;
        for (std::size_t k = 0; k < cs[i].body.size(); ++k)
            if (r12_applicable(cs[i], k, in)) if (emit(Selection{12, i, 0, k})) return;
    }
    // R3
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_implication()) continue;
        std::size_t k = 0;
        const Atom* a = first_user_atom(cs[i], k);
        if (!a) continue;
        for (std::size_t j = 0; j < cs.size(); ++j) {
            const Conjunct& d = cs[j];
            if (!d.is_atomic() || !d.atom.is_user() || d.atom.pred != a->pred || d.atom.args.size() != a->args.size())
                continue;
            auto g = key({3, static_cast<std::int64_t>(cs[i].id), static_cast<std::int64_t>(d.id),
                          static_cast<std::int64_t>(k)});
            if (!n.guard.count(g)) if (emit(Selection{3, i, j, k})) return;
        }
    }
    // R5: pairs ordered by (older id, newer id)
    {
        std::vector<std::size_t> abd;
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (cs[i].is_atomic() && cs[i].atom.kind == AtomKind::Abducible) abd.push_back(i);
        std::sort(abd.begin(), abd.end(), [&](std::size_t a, std::size_t b) { return cs[a].id < cs[b].id; });
        for (std::size_t x = 0; x < abd.size(); ++x)
            for (std::size_t y = x + 1; y < abd.size(); ++y) {
                const Conjunct& a = cs[abd[x]];
                const Conjunct& b = cs[abd[y]];
                if (a.atom.pred != b.atom.pred || a.atom.args.size() != b.atom.args.size()) continue;
                auto g = key({5, static_cast<std::int64_t>(a.id), static_cast<std::int64_t>(b.id)});
                if (!n.guard.count(g)) if (emit(Selection{5, abd[x], abd[y], 0})) return;
            }
    }
    // R4
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].is_disjunction()) if (emit(Selection{4, i, 0, 0})) return;
    // R18
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (r18_applicable(cs[i])) if (emit(Selection{18, i, 0, 0})) return;
}

std::optional<Selection> Engine::select(const Node& n) const {
    std::optional<Selection> out;
    scan(n, [&](const Selection& s) {
        out = s;
        return true;
    });
    return out;
}

std::vector<Selection> Engine::applicable(const Node& n) const {
    std::vector<Selection> out;
    scan(n, [&](const Selection& s) {
        out.push_back(s);
        return false;
    });
    return out;
}

namespace {

class Applier {
public:
    Applier(const CiffTheory& th, Fresh& f) : th_(th), f_(f) {}

    std::vector<Node> apply(const Node& n, const Selection& s) {
        if (s.first >= n.conjuncts.size()) throw InvalidSelection("stale conjunct index");
        Info in = analyse(n);
        Node out = n;
        auto& cs = out.conjuncts;
        const Conjunct& c = n.conjuncts[s.first];
        switch (s.rule) {
            case 1: return {unfold(out, s.first, in)};
            case 2: {
                const Atom& p = c.body.at(s.pos).atom;
                std::vector<Conjunct> repl;
                for (auto& d : instantiate(p)) {
                    std::vector<Literal> body = d;
                    for (std::size_t k = 0; k < c.body.size(); ++k)
                        if (k != s.pos) body.push_back(c.body[k]);
                    repl.push_back(rename_apart(make_implication(f_.next(), body, c.head), in.exist, f_));
                }
                splice(cs, s.first, std::move(repl));
                return {out};
            }
            case 3: {
                const Conjunct& a = n.conjuncts.at(s.second);
                const Atom& t = c.body.at(s.pos).atom;
                if (!a.is_atomic() || a.atom.pred != t.pred) throw InvalidSelection("propagation partner mismatch");
                std::vector<Literal> body;
                for (std::size_t k = 0; k < t.args.size(); ++k) body.push_back(pos(make_equality(t.args[k], a.atom.args[k])));
                if (body.empty()) body.push_back(pos(make_true()));
                for (std::size_t k = 0; k < c.body.size(); ++k)
                    if (k != s.pos) body.push_back(c.body[k]);
                out.guard.insert(key({3, static_cast<std::int64_t>(c.id), static_cast<std::int64_t>(a.id),
                                      static_cast<std::int64_t>(s.pos)}));
                Conjunct imp = rename_apart(make_implication(f_.next(), body, c.head), in.exist, f_);
                cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(s.first), std::move(imp));
                return {out};
            }
            case 4: {
                std::vector<Node> succ;
                for (const auto& d : c.disjuncts) {
                    Node m = n;
                    splice(m.conjuncts, s.first, d);
                    succ.push_back(std::move(m));
                }
                return succ;
            }
            case 5: {
                const Conjunct& a = n.conjuncts.at(s.first);
                const Conjunct& b = n.conjuncts.at(s.second);
                std::vector<Literal> eqs;
                for (std::size_t k = 0; k < a.atom.args.size(); ++k)
                    eqs.push_back(pos(make_equality(a.atom.args[k], b.atom.args[k])));
                std::vector<Conjunct> d1{a, b, make_implication(f_.next(), eqs, {make_false()})};
                std::vector<Conjunct> d2{a};
                for (const auto& e : eqs) d2.push_back(make_atomic(f_.next(), e.atom));
                out.guard.insert(key({5, static_cast<std::int64_t>(a.id), static_cast<std::int64_t>(b.id)}));
                Conjunct dis = make_disjunction(f_.next(), {d1, d2});
                std::size_t lo = std::min(s.first, s.second), hi = std::max(s.first, s.second);
                cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(hi));
                cs[lo] = std::move(dis);
                return {out};
            }
            case 6: {
                Atom con = c.body.at(s.pos).atom;
                Atom prime = con.kind == AtomKind::Equality ? make_constraint(CmpOp::Eq, con.args[0], con.args[1]) : con;
                Atom neg = make_constraint(complement(prime.op), prime.args[0], prime.args[1]);
                std::vector<Literal> rest;
                for (std::size_t k = 0; k < c.body.size(); ++k)
                    if (k != s.pos) rest.push_back(c.body[k]);
                std::vector<Conjunct> d1{make_atomic(f_.next(), neg)};
                std::vector<Conjunct> d2{make_atomic(f_.next(), prime), make_implication(f_.next(), rest, c.head)};
                cs[s.first] = make_disjunction(f_.next(), {d1, d2});
                return {out};
            }
            case 8: {
                auto o = rewrite_equality({c.atom.args[0], c.atom.args[1]}, no_universals());
                std::vector<Conjunct> repl;
                for (auto& l : rewritten_literals(o)) repl.push_back(make_atomic(f_.next(), l.atom));
                out.guard.insert(key({8, static_cast<std::int64_t>(c.id)}));
                splice(cs, s.first, std::move(repl));
                return {out};
            }
            case 9: {
                const Atom& e = c.body.at(s.pos).atom;
                auto o = rewrite_equality({e.args[0], e.args[1]}, universal_test(in));
                std::vector<Literal> body;
                for (std::size_t k = 0; k < c.body.size(); ++k) {
                    if (k != s.pos) {
                        body.push_back(c.body[k]);
                        continue;
                    }
                    for (auto& l : rewritten_literals(o)) body.push_back(l);
                }
                out.guard.insert(key({9, static_cast<std::int64_t>(c.id), static_cast<std::int64_t>(s.pos)}));
                cs[s.first] = make_implication(f_.next(), body, c.head);
                return {out};
            }
            case 10: {
                out.guard.insert(r10_key(n, s.first));
                Substitution sub{{c.atom.args[0]->var_id(), c.atom.args[1]}};
                for (std::size_t j = 0; j < cs.size(); ++j)
                    if (j != s.first) cs[j] = substitute(cs[j], sub);
                return {out};
            }
            case 11: {
                const Atom& e = c.body.at(s.pos).atom;
                Substitution sub{{e.args[0]->var_id(), e.args[1]}};
                std::vector<Literal> body;
                for (std::size_t k = 0; k < c.body.size(); ++k)
                    if (k != s.pos) body.push_back(c.body[k]);
                Conjunct imp = substitute(make_implication(f_.next(), body, c.head), sub);
                cs[s.first] = std::move(imp);
                return {out};
            }
            case 12: {
                const Atom& e = c.body.at(s.pos).atom;
                std::vector<Literal> rest;
                for (std::size_t k = 0; k < c.body.size(); ++k)
                    if (k != s.pos) rest.push_back(c.body[k]);
                std::vector<Conjunct> d1{make_atomic(f_.next(), e), make_implication(f_.next(), rest, c.head)};
                std::vector<Conjunct> d2{make_implication(f_.next(), {pos(e)}, {make_false()})};
                cs[s.first] = make_disjunction(f_.next(), {d1, d2});
                return {out};
            }
            case 13: {
                const Atom& a = c.body.at(s.pos).atom;
                std::vector<Literal> body;
                for (std::size_t k = 0; k < c.body.size(); ++k)
                    if (k != s.pos) body.push_back(c.body[k]);
                std::vector<Atom> head{a};
                for (const auto& h : c.head)
                    if (!h.is_false()) head.push_back(h);
                cs[s.first] = make_implication(f_.next(), body, head);
                return {out};
            }
            case 14:
            case 16:
                cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(s.first));
                return {out};
            case 15: {
                Conjunct imp = c;
                imp.id = f_.next();
                imp.body.erase(imp.body.begin() + static_cast<std::ptrdiff_t>(s.pos));
                cs[s.first] = std::move(imp);
                return {out};
            }
            case 17: {
                std::vector<Conjunct> repl;
                if (c.head.size() == 1) {
                    repl.push_back(make_atomic(f_.next(), c.head[0]));
                } else {
                    std::vector<std::vector<Conjunct>> ds;
                    for (const auto& h : c.head) ds.push_back({make_atomic(f_.next(), h)});
                    repl.push_back(make_disjunction(f_.next(), std::move(ds)));
                }
                splice(cs, s.first, std::move(repl));
                return {out};
            }
            case 18:
                out.undefined = true;
                return {out};
            default:
                throw InvalidSelection("rule " + std::to_string(s.rule) + " cannot be applied directly");
        }
    }

private:
    static void splice(std::vector<Conjunct>& cs, std::size_t at, std::vector<Conjunct> repl) {
        cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(at));
        cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(at), std::make_move_iterator(repl.begin()),
                  std::make_move_iterator(repl.end()));
    }

    // The disjuncts of p's definition with head variables bound to p's arguments
    // and every other variable renamed to a fresh one. Empty disjuncts read as `true`.
    std::vector<std::vector<Literal>> instantiate(const Atom& p) {
        std::vector<std::vector<Literal>> out;
        const IffDefinition* def = definition_of(th_, p.predicate());
        if (!def) return out;
        for (const auto& d : def->disjuncts) {
            Renamer r(&f_.var);
            r.restrict_to(d.exist_vars);
            Substitution head;
            for (std::size_t k = 0; k < def->head_vars.size(); ++k) head[def->head_vars[k]->var_id()] = p.args[k];
            std::vector<Literal> ls;
            for (const auto& l : d.conjuncts) ls.push_back(Literal{substitute(rename(l.atom, r), head), l.positive});
            if (ls.empty()) ls.push_back(pos(make_true()));
            out.push_back(std::move(ls));
        }
        return out;
    }

    Node unfold(Node out, std::size_t i, const Info& in) {
        Atom p = out.conjuncts[i].atom;
        auto ds = instantiate(p);
        std::vector<std::vector<Conjunct>> conj;
        for (const auto& d : ds) {
            std::vector<Conjunct> cs;
            std::set<VarId> exist = in.exist;
            for (const auto& l : d)
                if (l.positive) collect_vars(l.atom, exist);
            for (const auto& l : d) {
                if (l.positive)
                    cs.push_back(make_atomic(f_.next(), l.atom));
                else
                    cs.push_back(rename_apart(make_implication(f_.next(), {pos(l.atom)}, {make_false()}), exist, f_));
            }
            conj.push_back(std::move(cs));
        }
        if (conj.empty())
            splice(out.conjuncts, i, {make_atomic(f_.next(), make_false())});
        else if (conj.size() == 1)
            splice(out.conjuncts, i, std::move(conj[0]));
        else
            splice(out.conjuncts, i, {make_disjunction(f_.next(), std::move(conj))});
        return out;
    }

    const CiffTheory& th_;
    Fresh& f_;
};

std::uint64_t node_size(const std::vector<Conjunct>& cs) {
    std::uint64_t n = 0;
    for (const auto& c : cs) {
        n += 1 + c.body.size() + c.head.size();
        for (const auto& d : c.disjuncts) n += node_size(d);
    }
    return n;
}

bool adds_c_conjuncts(int rule) { return rule == 1 || rule == 4 || rule == 8 || rule == 10 || rule == 17; }

Node fail_node(const Node& n) {
    Node out;
    out.guard = n.guard;
    std::set<VarId> cv = constraint_vars(n);
    ConjunctId id = 0;
    for (const auto& c : n.conjuncts) {
        id = std::max(id, c.id);
        if (!(c.is_atomic() && is_c(c.atom, cv))) out.conjuncts.push_back(c);
    }
    out.conjuncts.push_back(make_atomic(id + 1, make_false()));
    return out;
}

}  // namespace

std::optional<bool> Engine::satisfiable(const Node& n) const {
    SatResult r = check_sat(c_conjuncts(n), cfg_.solver);
    switch (r.kind) {
        case SatResult::Sat: return true;
        case SatResult::BudgetExceeded: return std::nullopt;
        default: return false;
    }
}

std::vector<Node> Engine::apply(const Node& n, const Selection& s) {
    Fresh f{next_var_, next_id_};
    Applier a(theory_, f);
    auto out = a.apply(n, s);
    next_var_ = f.var;
    next_id_ = f.id;
    return out;
}

// Shared bookkeeping of one derivation.
struct Worker {
    Engine& eng;
    Fresh fresh;
    DerivationResult& res;
    std::mutex* mu;  // null when single threaded
    std::atomic<std::uint64_t>& steps;
    std::atomic<bool>& stop;
    std::size_t* answers;
    // Frontier snapshot for tracing: nodes left of the current one, and the pending ones.
    std::vector<Node>* finished;
    std::function<std::vector<Node>()> pending;
    VarNamer* namer = nullptr;  // shared by all trace lines

    struct Item {
        Node node;
        bool dirty = false;
    };

    void lock_record(const std::function<void()>& f) {
        if (mu) {
            std::lock_guard<std::mutex> g(*mu);
            f();
        } else {
            f();
        }
    }

    bool take_step() {
        std::uint64_t k = ++steps;
        if (k > eng.cfg_.max_steps) {
            stop = true;
            return false;
        }
        return true;
    }

    void record(int rule, const Node& before, const std::vector<Node>& succ) {
        lock_record([&] {
            if (eng.cfg_.observer) eng.cfg_.observer(StepEvent{rule, &before, &succ});
            res.rules.push_back(rule);
            if (eng.cfg_.check_invariants)
                for (const auto& m : succ)
                    for (auto& v : check_quantifiers(m)) res.invariant_violations.push_back(rule_name(rule) + ": " + v);
            if (eng.cfg_.trace && finished) {
                std::vector<Node> f = *finished;
                f.insert(f.end(), succ.begin(), succ.end());
                auto p = pending();
                f.insert(f.end(), p.begin(), p.end());
                res.trace.push_back({rule, to_string(f, namer)});
            }
        });
    }

    void leaf(LeafStatus st, Node n) {
        lock_record([&] {
            if (st == LeafStatus::Failure) {
                ++res.failures;
            } else {
                if (st == LeafStatus::Undefined) ++res.undefined;
                if (st == LeafStatus::Success && ++*answers >= eng.cfg_.max_answers) stop = true;
                res.leaves.push_back({st, n});
            }
            if (finished) finished->push_back(std::move(n));
        });
    }

    // Advances one node by one step. Returns the successors still open.
    std::vector<Item> step(Item it) {
        Node& n = it.node;
        if (it.dirty) {
            it.dirty = false;
            if (!propagate_consistent(c_conjuncts(n), eng.cfg_.solver)) {
                if (!take_step()) return {std::move(it)};
                Node failed = fail_node(n);
                std::vector<Node> succ{failed};
                record(7, n, succ);
                leaf(LeafStatus::Failure, failed);
                return {};
            }
        }
        if (eng.cfg_.max_node_size && node_size(n.conjuncts) > eng.cfg_.max_node_size) {
            lock_record([&] { res.budget_exhausted = true; ++res.open_branches; });
            return {};
        }
        std::optional<Selection> sel = eng.select(n);
        if (!sel || sel->rule == 18) {
            std::optional<bool> sat = eng.satisfiable(n);
            if (!sat) {
                lock_record([&] { res.budget_exhausted = true; ++res.open_branches; });
                return {};
            }
            if (!*sat) {
                if (!take_step()) return {std::move(it)};
                Node failed = fail_node(n);
                std::vector<Node> succ{failed};
                record(7, n, succ);
                leaf(LeafStatus::Failure, failed);
                return {};
            }
            if (!sel) {
                leaf(LeafStatus::Success, n);
                return {};
            }
        }
        if (!take_step()) return {std::move(it)};
        Applier a(eng.theory_, fresh);
        std::vector<Node> succ = a.apply(n, *sel);
        bool dirty = adds_c_conjuncts(sel->rule);
        record(sel->rule, n, succ);
        std::vector<Item> open;
        for (auto& m : succ) {
            if (m.undefined) {
                leaf(LeafStatus::Undefined, std::move(m));
            } else if (m.failed()) {
                leaf(LeafStatus::Failure, std::move(m));
            } else {
                open.push_back({std::move(m), dirty});
            }
        }
        return open;
    }

};

DerivationResult Engine::derive(const Query& q) {
    DerivationResult res;
    Node init = initial_node(q);
    res.rules.push_back(kInit);
    VarNamer namer;
    if (cfg_.trace) res.trace.push_back({kInit, to_string(std::vector<Node>{init}, &namer)});

    std::atomic<std::uint64_t> steps{0};
    std::atomic<bool> stop{false};
    std::size_t answers = 0;
    using Item = Worker::Item;

    if (cfg_.parallel <= 1) {
        std::deque<Item> frontier;  // front is the leftmost node
        std::vector<Node> finished;
        Worker w{*this, Fresh{next_var_, next_id_}, res, nullptr, steps, stop, &answers,
                 cfg_.trace ? &finished : nullptr, {}, &namer};
        w.pending = [&]() {
            std::vector<Node> p;
            for (const auto& it : frontier) p.push_back(it.node);
            return p;
        };
        frontier.push_back({std::move(init), false});
        while (!frontier.empty() && !stop) {
            if (frontier.size() > cfg_.max_nodes) {
                res.budget_exhausted = true;
                break;
            }
            Item it = std::move(frontier.front());
            frontier.pop_front();
            std::vector<Item> open = w.step(std::move(it));
            if (cfg_.fair) {
                for (auto& o : open) frontier.push_back(std::move(o));
            } else {
                for (auto r = open.rbegin(); r != open.rend(); ++r) frontier.push_front(std::move(*r));
            }
        }
        if (stop && steps > cfg_.max_steps) res.budget_exhausted = true;
        if (res.budget_exhausted) res.open_branches += frontier.size();
        next_var_ = w.fresh.var;
        next_id_ = w.fresh.id;
    } else {
        std::mutex mu;
        std::condition_variable cv;
        std::deque<Item> shared;
        unsigned idle = 0;
        bool done = false;
        shared.push_back({std::move(init), false});
        const unsigned k = cfg_.parallel;
        constexpr VarId kStride = VarId(1) << 40;
        std::vector<std::thread> pool;
        std::vector<Fresh> ends(k);
        for (unsigned t = 0; t < k; ++t) {
            pool.emplace_back([&, t] {
                Worker w{*this, Fresh{next_var_ + kStride * (t + 1), next_id_ + kStride * (t + 1)}, res, &mu, steps,
                         stop, &answers, nullptr, {}};
                std::vector<Item> local;
                for (;;) {
                    if (local.empty()) {
                        std::unique_lock<std::mutex> g(mu);
                        ++idle;
                        cv.wait(g, [&] { return done || !shared.empty() || stop; });
                        if (done || stop || shared.empty()) {
                            done = true;
                            cv.notify_all();
                            break;
                        }
                        --idle;
                        local.push_back(std::move(shared.front()));
                        shared.pop_front();
                    }
                    if (stop) break;
                    Item it = std::move(local.back());
                    local.pop_back();
                    std::vector<Item> open = w.step(std::move(it));
                    for (std::size_t i = 1; i < open.size(); ++i) {
                        std::lock_guard<std::mutex> g(mu);
                        shared.push_back(std::move(open[i]));
                        cv.notify_one();
                    }
                    if (!open.empty()) local.push_back(std::move(open[0]));
                    std::lock_guard<std::mutex> g(mu);
                    if (local.empty() && shared.empty() && idle == k - 1) {
                        done = true;
                        cv.notify_all();
                    }
                }
                std::lock_guard<std::mutex> g(mu);
                if (stop) res.open_branches += local.size();
                ends[t] = w.fresh;
            });
        }
        for (auto& th : pool) th.join();
        if (steps > cfg_.max_steps) res.budget_exhausted = true;
        if (res.budget_exhausted) res.open_branches += shared.size();
        for (const auto& e : ends) {
            next_var_ = std::max(next_var_, e.var);
            next_id_ = std::max(next_id_, e.id);
        }
    }

    res.steps = std::min<std::uint64_t>(steps, cfg_.max_steps);
    if (!res.successes().empty())
        res.status = DerivationResult::Success;
    else if (res.budget_exhausted)
        res.status = DerivationResult::BudgetExhausted;
    else if (res.undefined > 0)
        res.status = DerivationResult::Undefined;
    else
        res.status = DerivationResult::Failure;
    return res;
}

void check_query_against_program(const Program& p, const Query& q) {
    std::map<std::string, std::size_t> arity;
    for (const auto& pr : user_predicates(p)) arity[pr.name] = pr.arity;
    for (const auto& pr : user_predicates(q)) {
        auto it = arity.find(pr.name);
        if (it != arity.end() && it->second != pr.arity)
            throw std::invalid_argument("predicate " + pr.name + " is used with arity " + std::to_string(pr.arity) +
                                        " in the query but " + std::to_string(it->second) + " in the program");
    }
}

Program preground(const Program& p) {
    std::map<Pred, std::vector<Atom>> facts;
    std::set<Pred> other;
    for (const auto& c : p.clauses) {
        if (c.body.empty() && is_ground(c.head))
            facts[c.head.predicate()].push_back(c.head);
        else
            other.insert(c.head.predicate());
    }
    for (const auto& o : other) facts.erase(o);

    Program out = p;
    out.ics.clear();
    for (const auto& ic : p.ics) {
        std::vector<const Atom*> table;
        std::vector<Literal> rest;
        std::set<VarId> covered, all;
        for (const auto& l : ic.body) {
            collect_vars(l.atom, all);
            if (l.positive && l.atom.kind == AtomKind::Defined && facts.count(l.atom.predicate())) {
                table.push_back(&l.atom);
                collect_vars(l.atom, covered);
            } else {
                rest.push_back(l);
            }
        }
        for (const auto& a : ic.head) collect_vars(a, all);
        if (table.empty() || !subset_of(all, covered)) {
            out.ics.push_back(ic);
            continue;
        }
        std::function<void(std::size_t, Substitution&)> join = [&](std::size_t k, Substitution& s) {
            if (k == table.size()) {
                IntegrityConstraint g;
                for (const auto& l : rest) g.body.push_back(Literal{substitute(l.atom, s), l.positive});
                for (const auto& a : ic.head) g.head.push_back(substitute(a, s));
                out.ics.push_back(std::move(g));
                return;
            }
            Atom pat = substitute(*table[k], s);
            for (const auto& f : facts.at(pat.predicate())) {
                auto m = normalize_equalities(
                    [&] {
                        std::vector<Equation> eqs;
                        for (std::size_t i = 0; i < f.args.size(); ++i) eqs.emplace_back(pat.args[i], f.args[i]);
                        return eqs;
                    }(),
                    no_universals());
                if (!m) continue;
                Substitution next = s;
                for (const auto& [v, t] : *m) next[v->var_id()] = t;
                for (auto& [v, t] : next) t = substitute(t, next);
                join(k + 1, next);
            }
        };
        Substitution s;
        join(0, s);
    }
    return out;
}

}  // namespace ciff
