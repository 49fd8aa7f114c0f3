#include "ciff/completion.hpp"

namespace ciff {

namespace {

void scan_max(const Atom& a, VarId& m) {
    std::set<VarId> vs;
    collect_vars(a, vs);
    if (!vs.empty()) m = std::max(m, *vs.rbegin());
}

VarId max_var(const Program& p) {
    VarId m = 0;
    for (const auto& c : p.clauses) {
        scan_max(c.head, m);
        for (const auto& l : c.body) scan_max(l.atom, m);
    }
    for (const auto& ic : p.ics) {
        for (const auto& l : ic.body) scan_max(l.atom, m);
        for (const auto& a : ic.head) scan_max(a, m);
    }
    return m;
}

}  // namespace

CiffTheory complete(const Program& program, const std::set<Pred>& extra_predicates) {
    CiffTheory th;
    th.abducibles = program.abducibles;
    th.ics = program.ics;
    VarId counter = max_var(program);

    std::set<Pred> signature = user_predicates(program);
    signature.insert(extra_predicates.begin(), extra_predicates.end());
    for (const auto& p : signature) {
        if (program.abducibles.count(p)) continue;
        IffDefinition def;
        def.pred = p;
        for (std::size_t i = 0; i < p.arity; ++i) def.head_vars.push_back(make_var("X", ++counter));
        th.defs.emplace(p, std::move(def));
    }
    for (const auto& c : program.clauses) {
        IffDefinition& def = th.defs.at(c.head.predicate());
        Disjunct d;
        for (std::size_t i = 0; i < c.head.args.size(); ++i) {
            d.conjuncts.push_back(Literal{make_equality(def.head_vars[i], c.head.args[i]), true});
            collect_vars(c.head.args[i], d.exist_vars);
        }
        for (const auto& l : c.body) {
            d.conjuncts.push_back(l);
            collect_vars(l.atom, d.exist_vars);
        }
        def.disjuncts.push_back(std::move(d));
    }
    th.max_var_id = counter;
    return th;
}

const IffDefinition* definition_of(const CiffTheory& theory, const Pred& pred) {
    auto it = theory.defs.find(pred);
    return it == theory.defs.end() ? nullptr : &it->second;
}

std::string to_string(const IffDefinition& def) {
    VarNamer n;
    std::string out = def.pred.name;
    if (!def.head_vars.empty()) {
        out += '(';
        for (std::size_t i = 0; i < def.head_vars.size(); ++i) {
            if (i) out += ',';
            out += to_string(def.head_vars[i], &n);
        }
        out += ')';
    }
    out += " <-> ";
    if (def.disjuncts.empty()) return out + "false";
    for (std::size_t i = 0; i < def.disjuncts.size(); ++i) {
        if (i) out += " \\/ ";
        const auto& d = def.disjuncts[i];
        out += '[';
        if (d.conjuncts.empty()) out += "true";
        for (std::size_t k = 0; k < d.conjuncts.size(); ++k) {
            if (k) out += ", ";
            out += to_string(d.conjuncts[k], &n);
        }
        out += ']';
    }
    return out;
}

std::string to_string(const CiffTheory& theory) {
    std::string out;
    for (const auto& [p, def] : theory.defs) out += to_string(def) + "\n";
    if (!theory.abducibles.empty()) {
        out += "abducibles:";
        for (const auto& a : theory.abducibles) out += " " + to_string(a);
        out += "\n";
    }
    for (const auto& ic : theory.ics) out += "ic: " + to_string(ic) + "\n";
    return out;
}

}  // namespace ciff
