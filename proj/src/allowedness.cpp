#include "ciff/allowedness.hpp"

#include <functional>

namespace ciff {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::NotAllowed: return "not_allowed";
        case Verdict::CiffAllowed: return "ciff_allowed";
        case Verdict::StaticallyAllowed: return "statically_allowed";
        case Verdict::IffAllowed: return "iff_allowed";
    }
    return "not_allowed";
}

namespace {

using Covers = std::function<bool(const Literal&)>;

bool positive(const Literal& l) { return l.positive; }
bool positive_non_constraint(const Literal& l) { return l.positive && l.atom.kind != AtomKind::Constraint; }
bool positive_user(const Literal& l) { return l.positive && l.atom.is_user(); }
bool positive_non_equality(const Literal& l) { return l.positive && l.atom.kind != AtomKind::Equality; }

std::string var_name(const std::vector<Literal>& ls, VarId v) {
    std::function<const Term*(const TermPtr&)> find = [&](const TermPtr& t) -> const Term* {
        if (t->is_var()) return t->var_id() == v ? t.get() : nullptr;
        for (const auto& a : t->args)
            if (const Term* r = find(a)) return r;
        return nullptr;
    };
    for (const auto& l : ls)
        for (const auto& a : l.atom.args)
            if (const Term* r = find(a)) return r->name;
    return "_";
}

// Every variable of `ls` outside `exempt` must occur in a literal accepted by `covers`.
void check_group(const std::vector<Literal>& ls, const std::set<VarId>& exempt, const Covers& covers,
                 const std::string& location, const std::string& reason, std::vector<Violation>& out) {
    std::set<VarId> all, covered;
    for (const auto& l : ls) {
        collect_vars(l.atom, all);
        if (covers(l)) collect_vars(l.atom, covered);
    }
    for (VarId v : all) {
        if (exempt.count(v) || covered.count(v)) continue;
        Violation vio{location, var_name(ls, v), reason, {}};
        vio.suggestion = "if " + vio.variable + " is meant as a constraint variable, adding " + vio.variable +
                         " #= " + vio.variable + " makes it occur in an atomic conjunct";
        out.push_back(std::move(vio));
    }
}

std::vector<Literal> ic_literals(const IntegrityConstraint& ic) {
    std::vector<Literal> ls = ic.body;
    for (const auto& a : ic.head) ls.push_back(Literal{a, true});
    return ls;
}

struct Criterion {
    Covers definition;
    Covers ic;  // empty: integrity constraints are unrestricted
    Covers query;
    const char* definition_reason;
    const char* ic_reason;
    const char* query_reason;
};

AllowednessReport run(const CiffTheory& theory, const Query& query, const Criterion& c, Verdict ok) {
    AllowednessReport r;
    for (const auto& [pred, def] : theory.defs) {
        std::set<VarId> head;
        for (const auto& h : def.head_vars) head.insert(h->var_id());
        for (std::size_t i = 0; i < def.disjuncts.size(); ++i)
            check_group(def.disjuncts[i].conjuncts, head, c.definition,
                        "definition " + to_string(pred) + ", disjunct " + std::to_string(i + 1), c.definition_reason,
                        r.violations);
    }
    if (c.ic) {
        for (std::size_t i = 0; i < theory.ics.size(); ++i) {
            std::vector<Literal> ls = ic_literals(theory.ics[i]);
            std::set<VarId> covered;
            for (const auto& l : theory.ics[i].body)
                if (c.ic(l)) collect_vars(l.atom, covered);
            std::set<VarId> all;
            for (const auto& l : ls) collect_vars(l.atom, all);
            for (VarId v : all)
                if (!covered.count(v))
                    r.violations.push_back(
                        {"integrity constraint " + std::to_string(i + 1), var_name(ls, v), c.ic_reason, {}});
        }
    }
    check_group(query.conjuncts, {}, c.query, "query", c.query_reason, r.violations);
    r.verdict = r.violations.empty() ? ok : Verdict::NotAllowed;
    return r;
}

}  // namespace

AllowednessReport check_ciff_allowed(const CiffTheory& theory, const Query& query) {
    Criterion c{positive, {}, positive, "occurs in no atomic conjunct of the disjunct", "",
                "occurs in no atomic conjunct of the query"};
    return run(theory, query, c, Verdict::CiffAllowed);
}

AllowednessReport check_statically_allowed(const CiffTheory& theory, const Query& query) {
    Criterion c{positive_user,
                positive_non_constraint,
                positive_non_constraint,
                "occurs in no non-equality, non-constraint atomic conjunct of the disjunct",
                "occurs in no non-constraint atomic conjunct of the body",
                "occurs in no non-constraint atomic conjunct of the query"};
    return run(theory, query, c, Verdict::StaticallyAllowed);
}

AllowednessReport check_iff_allowed(const CiffTheory& theory, const Query& query) {
    Criterion c{positive_non_equality,
                positive,
                positive,
                "occurs in no non-equality atomic conjunct of the disjunct",
                "occurs in no atomic conjunct of the body",
                "occurs in no atomic conjunct of the query"};
    return run(theory, query, c, Verdict::IffAllowed);
}

bool has_constraints(const CiffTheory& theory, const Query& query) {
    auto any = [](const std::vector<Literal>& ls) {
        for (const auto& l : ls)
            if (l.atom.kind == AtomKind::Constraint) return true;
        return false;
    };
    for (const auto& [p, def] : theory.defs)
        for (const auto& d : def.disjuncts)
            if (any(d.conjuncts)) return true;
    for (const auto& ic : theory.ics)
        if (any(ic_literals(ic))) return true;
    return any(query.conjuncts);
}

AllowednessReport classify(const CiffTheory& theory, const Query& query) {
    AllowednessReport ciff = check_ciff_allowed(theory, query);
    if (ciff.verdict == Verdict::NotAllowed) return ciff;
    AllowednessReport stat = check_statically_allowed(theory, query);
    if (stat.verdict == Verdict::NotAllowed) return {Verdict::CiffAllowed, stat.violations};
    if (has_constraints(theory, query)) return {Verdict::StaticallyAllowed, {}};
    AllowednessReport iff = check_iff_allowed(theory, query);
    if (iff.verdict == Verdict::NotAllowed) return {Verdict::StaticallyAllowed, iff.violations};
    return iff;
}

bool is_statically_allowed_implication(const Conjunct& imp, const std::set<VarId>& existential) {
    if (!imp.is_implication()) return false;
    auto universal = [&](VarId v) { return !existential.count(v); };

    std::set<VarId> body_vars, head_vars, anchored;
    for (const auto& l : imp.body) {
        collect_vars(l.atom, body_vars);
        if (l.positive && l.atom.kind != AtomKind::Constraint) collect_vars(l.atom, anchored);
    }
    for (const auto& a : imp.head) collect_vars(a, head_vars);

    for (VarId v : head_vars)
        if (universal(v) && !body_vars.count(v)) return false;

    for (const auto& l : imp.body) {
        if (l.positive && l.atom.kind != AtomKind::Constraint) continue;
        std::set<VarId> vs;
        collect_vars(l.atom, vs);
        for (VarId v : vs)
            if (universal(v) && !anchored.count(v)) return false;
    }

    for (const auto& l : imp.body) {
        if (!l.positive || l.atom.kind != AtomKind::Equality) continue;
        std::set<VarId> lhs, rhs, vs;
        collect_vars(l.atom.args[0], lhs);
        collect_vars(l.atom.args[1], rhs);
        collect_vars(l.atom, vs);
        for (VarId v : vs) {
            if (!universal(v)) continue;
            bool elsewhere = false;
            for (const auto& o : imp.body) {
                if (&o == &l) continue;
                std::set<VarId> ov;
                collect_vars(o.atom, ov);
                if (ov.count(v)) elsewhere = true;
            }
            if (elsewhere) continue;
            auto has_universal = [&](const std::set<VarId>& side) {
                for (VarId w : side)
                    if (universal(w)) return true;
                return false;
            };
            if (has_universal(lhs) && has_universal(rhs)) return false;
        }
    }
    return true;
}

}  // namespace ciff
