#include "ciff/answers.hpp"

#include <json.hpp>

#include "ciff/engine.hpp"

namespace ciff {

namespace {

bool var_var(const Atom& a) {
    return a.kind == AtomKind::Equality && a.args[0]->is_var() && a.args[1]->is_var();
}

std::set<VarId> closed_constraint_vars(const Node& n) {
    std::set<VarId> cv = constraint_vars(n);
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& c : n.conjuncts) {
            if (!c.is_atomic() || !var_var(c.atom)) continue;
            VarId l = c.atom.args[0]->var_id(), r = c.atom.args[1]->var_id();
            if (cv.count(l) != cv.count(r)) {
                cv.insert(l);
                cv.insert(r);
                grew = true;
            }
        }
    }
    return cv;
}

// Structural key; `=` and `=/=` read both ways round.
std::string pair_key(const std::string& op, const TermPtr& l, const TermPtr& r, bool symmetric) {
    std::string a = to_string(l), b = to_string(r);
    if (symmetric && b < a) std::swap(a, b);
    return a + op + b;
}

enum class Slot { Delta, Gamma, E, DE, None };

Slot slot_of(const Conjunct& c, const std::set<VarId>& cv, const std::set<VarId>& exist) {
    if (c.is_implication()) return is_ciff_disequality(c, exist) ? Slot::DE : Slot::None;
    if (!c.is_atomic()) return Slot::None;
    const Atom& a = c.atom;
    if (a.kind == AtomKind::Abducible) return Slot::Delta;
    if (a.kind == AtomKind::Constraint) return Slot::Gamma;
    if (a.kind != AtomKind::Equality) return Slot::None;
    CAtomClass k = classify_c_atom(a, cv);
    if (k == CAtomClass::BasicCAtom || k == CAtomClass::CAtom) return Slot::Gamma;
    return Slot::E;
}

}  // namespace

ExtractedAnswer extract(const Node& leaf) {
    if (leaf.failed() || leaf.undefined) throw NotSuccessful("answers are read off successful leaves only");
    std::set<VarId> cv = closed_constraint_vars(leaf);
    std::set<VarId> exist = existential_vars(leaf);
    ExtractedAnswer a;
    std::set<std::string> seen;
    for (const auto& c : leaf.conjuncts) {
        switch (slot_of(c, cv, exist)) {
            case Slot::Delta:
                if (seen.insert("d" + to_string(c.atom)).second) a.delta.push_back(c.atom);
                break;
            case Slot::Gamma: {
                CAtom g = to_catom(c.atom);
                bool sym = g.op == CmpOp::Eq || g.op == CmpOp::Ne;
                if (seen.insert("g" + pair_key(cmp_symbol(g.op), g.lhs, g.rhs, sym)).second) a.gamma.push_back(g);
                break;
            }
            case Slot::E:
                if (seen.insert("e" + pair_key("=", c.atom.args[0], c.atom.args[1], true)).second)
                    a.equalities.emplace_back(c.atom.args[0], c.atom.args[1]);
                break;
            case Slot::DE: {
                const Atom& e = c.body[0].atom;
                if (seen.insert("n" + pair_key("=", e.args[0], e.args[1], true)).second)
                    a.disequalities.push_back({e.args[0], e.args[1]});
                break;
            }
            case Slot::None: break;
        }
    }
    Substitution fold;
    for (const auto& [x, t] : a.equalities)
        if (x->is_var() && !occurs(x->var_id(), t)) fold.emplace(x->var_id(), t);
    if (!fold.empty()) {
        for (auto& d : a.delta) d = substitute(d, fold);
        for (auto& d : a.disequalities) {
            d.var = substitute(d.var, fold);
            d.term = substitute(d.term, fold);
        }
    }
    return a;
}

std::string check_extraction(const Node& leaf, const ExtractedAnswer& a) {
    std::set<VarId> cv = closed_constraint_vars(leaf);
    std::set<VarId> exist = existential_vars(leaf);
    std::set<std::string> distinct[4];
    for (const auto& c : leaf.conjuncts) {
        if (c.is_atomic() && c.atom.kind == AtomKind::Defined) return "defined atom left in a successful leaf";
        Slot s = slot_of(c, cv, exist);
        if (s == Slot::None) continue;
        std::string k;
        if (s == Slot::DE) {
            k = pair_key("=", c.body[0].atom.args[0], c.body[0].atom.args[1], true);
        } else if (s == Slot::Delta) {
            k = to_string(c.atom);
        } else {
            CAtom g = to_catom(c.atom);
            bool sym = g.op == CmpOp::Eq || g.op == CmpOp::Ne;
            k = pair_key(s == Slot::E ? "=" : cmp_symbol(g.op), g.lhs, g.rhs, sym);
        }
        distinct[static_cast<int>(s)].insert(k);
    }
    std::size_t counts[4] = {distinct[0].size(), distinct[1].size(), distinct[2].size(), distinct[3].size()};
    if (counts[0] != a.delta.size()) return "abducible count mismatch";
    if (counts[1] != a.gamma.size()) return "constraint count mismatch";
    if (counts[2] != a.equalities.size()) return "equality count mismatch";
    if (counts[3] != a.disequalities.size()) return "disequality count mismatch";
    for (const auto& d : a.disequalities)
        if (!d.var->is_var()) return "disequality without a variable on the left";
    return {};
}

bool ground_answer(const ExtractedAnswer& a, const SolverConfig& cfg,
                   const std::function<bool(const GroundAnswer&)>& emit) {
    std::vector<VarId> labeled;
    {
        std::set<VarId> seen;
        for (const auto& c : a.gamma) {
            std::vector<VarId> vs;
            collect_vars_ordered(c.lhs, vs);
            collect_vars_ordered(c.rhs, vs);
            for (VarId v : vs)
                if (seen.insert(v).second) labeled.push_back(v);
        }
    }
    std::set<VarId> solved;
    for (const auto& [x, t] : a.equalities)
        if (x->is_var()) solved.insert(x->var_id());

    std::vector<TermPtr> rest;  // remaining variables in first-seen order
    {
        std::set<VarId> seen(labeled.begin(), labeled.end());
        seen.insert(solved.begin(), solved.end());
        std::function<void(const TermPtr&)> visit = [&](const TermPtr& t) {
            if (t->is_var()) {
                if (seen.insert(t->var_id()).second) rest.push_back(t);
                return;
            }
            for (const auto& s : t->args) visit(s);
        };
        for (const auto& d : a.delta)
            for (const auto& t : d.args) visit(t);
        for (const auto& d : a.disequalities) {
            visit(d.var);
            visit(d.term);
        }
        for (const auto& [x, t] : a.equalities) {
            visit(x);
            visit(t);
        }
    }

    ConstraintStore store{a.gamma, {}};
    return label(store, labeled, cfg, [&](const Witness& w) {
        GroundAnswer g;
        for (VarId v : labeled) g.witness[v] = make_int(w.at(v));
        int k = 0;
        for (const auto& v : rest) {
            std::string name = "sk_" + std::to_string(++k);
            g.witness[v->var_id()] = make_const(name);
            g.skolems[name] = v;
        }
        for (std::size_t round = 0; round <= a.equalities.size(); ++round)
            for (const auto& [x, t] : a.equalities)
                if (x->is_var()) g.witness[x->var_id()] = substitute(t, g.witness);
        for (const auto& d : a.disequalities) {
            TermPtr l = substitute(d.var, g.witness), r = substitute(d.term, g.witness);
            if (term_equal(l, r)) return true;
        }
        for (const auto& [x, t] : a.equalities)
            if (!term_equal(substitute(x, g.witness), substitute(t, g.witness))) return true;
        for (const auto& d : a.delta) g.delta.push_back(substitute(d, g.witness));
        return emit(g);
    });
}

namespace {

struct Rendered {
    std::vector<std::string> abducibles, disequalities, constraints, equalities;
};

Rendered render(const ExtractedAnswer& a, VarNamer& namer) {
    Rendered r;
    for (const auto& d : a.delta) r.abducibles.push_back(to_string(d, &namer));
    for (const auto& d : a.disequalities)
        r.disequalities.push_back(to_string(d.var, &namer) + "\\==" + to_string(d.term, &namer));
    for (const auto& c : a.gamma) r.constraints.push_back(to_string(c, &namer));
    for (const auto& [x, t] : a.equalities) r.equalities.push_back(to_string(x, &namer) + "=" + to_string(t, &namer));
    return r;
}

std::string list(const std::vector<std::string>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
    return out + "]";
}

}  // namespace

std::string format_answer(const ExtractedAnswer& a, bool show_equalities) {
    VarNamer namer;
    Rendered r = render(a, namer);
    std::string out = list(r.abducibles) + ", " + list(r.disequalities) + ", " + list(r.constraints);
    if (show_equalities) out += ", " + list(r.equalities);
    return out;
}

std::string answer_json(const ExtractedAnswer& a, bool show_equalities, const GroundAnswer* ground) {
    VarNamer namer;
    Rendered r = render(a, namer);
    nlohmann::ordered_json j;
    j["status"] = "success";
    j["abducibles"] = r.abducibles;
    j["constraints"] = r.constraints;
    j["disequalities"] = r.disequalities;
    if (show_equalities) j["equalities"] = r.equalities;
    nlohmann::ordered_json sk = nlohmann::ordered_json::object();
    if (ground) {
        std::vector<std::string> atoms;
        for (const auto& d : ground->delta) atoms.push_back(to_string(d));
        j["ground_abducibles"] = atoms;
        for (const auto& [name, v] : ground->skolems) sk[name] = to_string(v, &namer);
    }
    j["skolems"] = sk;
    return j.dump();
}

std::string status_json(const std::string& status) {
    nlohmann::ordered_json j;
    j["status"] = status;
    return j.dump();
}

}  // namespace ciff
