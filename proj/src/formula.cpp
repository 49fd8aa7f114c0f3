#include "ciff/formula.hpp"

namespace ciff {

Conjunct make_atomic(ConjunctId id, Atom a) {
    Conjunct c;
    c.id = id;
    c.kind = ConjunctKind::Atomic;
    c.atom = std::move(a);
    return c;
}

Conjunct make_implication(ConjunctId id, std::vector<Literal> body, std::vector<Atom> head) {
    Conjunct c;
    c.id = id;
    c.kind = ConjunctKind::Implicative;
    if (body.empty()) body.push_back(Literal{make_true(), true});
    if (head.empty()) head.push_back(make_false());
    c.body = std::move(body);
    c.head = std::move(head);
    return c;
}

Conjunct make_disjunction(ConjunctId id, std::vector<std::vector<Conjunct>> disjuncts) {
    Conjunct c;
    c.id = id;
    c.kind = ConjunctKind::Disjunctive;
    c.disjuncts = std::move(disjuncts);
    return c;
}

void collect_vars(const Conjunct& c, std::set<VarId>& out) {
    switch (c.kind) {
        case ConjunctKind::Atomic:
            collect_vars(c.atom, out);
            break;
        case ConjunctKind::Implicative:
            for (const auto& l : c.body) collect_vars(l.atom, out);
            for (const auto& a : c.head) collect_vars(a, out);
            break;
        case ConjunctKind::Disjunctive:
            for (const auto& d : c.disjuncts)
                for (const auto& x : d) collect_vars(x, out);
            break;
    }
}

Conjunct substitute(const Conjunct& c, const Substitution& s) {
    Conjunct r = c;
    switch (c.kind) {
        case ConjunctKind::Atomic:
            r.atom = substitute(c.atom, s);
            break;
        case ConjunctKind::Implicative:
            for (auto& l : r.body) l.atom = substitute(l.atom, s);
            for (auto& a : r.head) a = substitute(a, s);
            break;
        case ConjunctKind::Disjunctive:
            for (auto& d : r.disjuncts)
                for (auto& x : d) x = substitute(x, s);
            break;
    }
    return r;
}

bool Node::failed() const {
    for (const auto& c : conjuncts)
        if (c.is_atomic() && c.atom.is_false()) return true;
    return false;
}

std::set<VarId> existential_vars(const Node& n) {
    std::set<VarId> out;
    for (const auto& c : n.conjuncts)
        if (!c.is_implication()) collect_vars(c, out);
    return out;
}

bool is_ciff_disequality(const Conjunct& c, const std::set<VarId>& existential) {
    if (!c.is_implication() || c.body.size() != 1 || c.head.size() != 1) return false;
    if (!c.head[0].is_false()) return false;
    const Literal& l = c.body[0];
    if (!l.positive || l.atom.kind != AtomKind::Equality) return false;
    const TermPtr& x = l.atom.args[0];
    const TermPtr& t = l.atom.args[1];
    if (!x->is_var() || !existential.count(x->var_id())) return false;
    if (t->is_var() && !existential.count(t->var_id())) return false;
    return !occurs(x->var_id(), t);
}

namespace {

std::string body_item(const Literal& l, VarNamer* namer) {
    if (l.positive) return to_string(l.atom, namer);
    return "(" + to_string(l.atom, namer) + " -> false)";
}

std::string conjunction(const std::vector<Conjunct>& cs, VarNamer* namer) {
    std::string out = "[";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ", ";
        out += to_string(cs[i], namer);
    }
    return out + "]";
}

}  // namespace

std::string to_string(const Conjunct& c, VarNamer* namer) {
    std::string out;
    switch (c.kind) {
        case ConjunctKind::Atomic:
            return to_string(c.atom, namer);
        case ConjunctKind::Implicative:
            out = "[";
            for (std::size_t i = 0; i < c.body.size(); ++i) {
                if (i) out += ", ";
                out += body_item(c.body[i], namer);
            }
            out += " -> ";
            for (std::size_t i = 0; i < c.head.size(); ++i) {
                if (i) out += " \\/ ";
                out += to_string(c.head[i], namer);
            }
            return out + "]";
        case ConjunctKind::Disjunctive:
            out = "[";
            for (std::size_t i = 0; i < c.disjuncts.size(); ++i) {
                if (i) out += " \\/ ";
                out += conjunction(c.disjuncts[i], namer);
            }
            return out + "]";
    }
    return out;
}

std::string to_string(const Node& n, VarNamer* namer) {
    std::string out = n.undefined ? "undefined : {" : "{";
    for (std::size_t i = 0; i < n.conjuncts.size(); ++i) {
        if (i) out += ", ";
        out += to_string(n.conjuncts[i], namer);
    }
    return out + "}";
}

std::string to_string(const std::vector<Node>& formula, VarNamer* namer) {
    std::string out = "{";
    for (std::size_t i = 0; i < formula.size(); ++i) {
        if (i) out += ", ";
        out += to_string(formula[i], namer);
    }
    return out + "}";
}

}  // namespace ciff
