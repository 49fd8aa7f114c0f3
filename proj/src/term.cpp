#include "ciff/term.hpp"

#include <algorithm>

namespace ciff {

TermPtr make_var(std::string name, VarId id) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Var;
    t->name = std::move(name);
    t->value = id;
    return t;
}

TermPtr make_const(std::string name) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Const;
    t->name = std::move(name);
    return t;
}

TermPtr make_int(std::int64_t value) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Int;
    t->value = value;
    return t;
}

TermPtr make_compound(std::string functor, std::vector<TermPtr> args) {
    if (args.empty()) return make_const(std::move(functor));
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Compound;
    t->name = std::move(functor);
    t->args = std::move(args);
    return t;
}

TermPtr make_arith(ArithOp op, std::vector<TermPtr> operands) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Arith;
    t->op = op;
    t->name = arith_symbol(op);
    t->args = std::move(operands);
    return t;
}

const char* arith_symbol(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Abs: return "abs";
    }
    return "?";
}

int term_compare(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
        case TermKind::Var:
        case TermKind::Int:
            return a->value == b->value ? 0 : (a->value < b->value ? -1 : 1);
        case TermKind::Const:
            return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
        case TermKind::Compound:
        case TermKind::Arith: {
            if (a->kind == TermKind::Arith && a->op != b->op) return a->op < b->op ? -1 : 1;
            if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
            if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
            for (std::size_t i = 0; i < a->args.size(); ++i)
                if (int c = term_compare(a->args[i], b->args[i])) return c;
            return 0;
        }
    }
    return 0;
}

bool term_equal(const TermPtr& a, const TermPtr& b) { return term_compare(a, b) == 0; }

void collect_vars(const TermPtr& t, std::set<VarId>& out) {
    if (t->kind == TermKind::Var) {
        out.insert(t->value);
        return;
    }
    for (const auto& a : t->args) collect_vars(a, out);
}

void collect_vars_ordered(const TermPtr& t, std::vector<VarId>& out) {
    if (t->kind == TermKind::Var) {
        if (std::find(out.begin(), out.end(), t->value) == out.end()) out.push_back(t->value);
        return;
    }
    for (const auto& a : t->args) collect_vars_ordered(a, out);
}

bool occurs(VarId v, const TermPtr& t) {
    if (t->kind == TermKind::Var) return t->value == v;
    for (const auto& a : t->args)
        if (occurs(v, a)) return true;
    return false;
}

bool is_ground(const TermPtr& t) {
    if (t->kind == TermKind::Var) return false;
    for (const auto& a : t->args)
        if (!is_ground(a)) return false;
    return true;
}

bool is_herbrand(const TermPtr& t) {
    if (t->kind == TermKind::Arith) return false;
    for (const auto& a : t->args)
        if (!is_herbrand(a)) return false;
    return true;
}

TermPtr substitute(const TermPtr& t, const Substitution& s) {
    if (s.empty()) return t;
    if (t->kind == TermKind::Var) {
        auto it = s.find(t->value);
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    bool changed = false;
    for (const auto& a : t->args) {
        args.push_back(substitute(a, s));
        changed = changed || args.back().get() != a.get();
    }
    if (!changed) return t;
    auto n = std::make_shared<Term>(*t);
    n->args = std::move(args);
    return n;
}

TermPtr Renamer::rename(const TermPtr& t) {
    if (t->kind == TermKind::Var) {
        if (restricted_ && !only_.count(t->value)) return t;
        auto it = map_.find(t->value);
        if (it != map_.end()) return it->second;
        auto fresh = make_var(t->name, ++*counter_);
        map_.emplace(t->value, fresh);
        return fresh;
    }
    if (t->args.empty()) return t;
    std::vector<TermPtr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(rename(a));
    auto n = std::make_shared<Term>(*t);
    n->args = std::move(args);
    return n;
}

std::string VarNamer::name_of(const Term& var) {
    auto it = names_.find(var.value);
    if (it != names_.end()) return it->second;
    std::string base = var.name.empty() ? std::string("V") : var.name;
    std::string candidate = base;
    int n = 0;
    while (taken_.count(candidate)) candidate = base + std::to_string(++n);
    taken_.insert(candidate);
    names_.emplace(var.value, candidate);
    return candidate;
}

namespace {

int precedence(const Term& t) {
    if (t.kind != TermKind::Arith && t.kind != TermKind::Compound) return 3;
    if (t.args.size() != 2) return 3;
    if (t.name == "+" || t.name == "-") return 1;
    if (t.name == "*") return 2;
    return 3;
}

bool is_list_cell(const Term& t) { return t.kind == TermKind::Compound && t.name == "." && t.args.size() == 2; }

void print(const TermPtr& t, VarNamer* namer, std::string& out) {
    switch (t->kind) {
        case TermKind::Var:
            out += namer ? namer->name_of(*t) : t->name + "_" + std::to_string(t->value);
            return;
        case TermKind::Const:
            out += t->name;
            return;
        case TermKind::Int:
            out += std::to_string(t->value);
            return;
        case TermKind::Compound:
        case TermKind::Arith:
            break;
    }
    if (is_list_cell(*t)) {
        out += '[';
        const Term* cell = t.get();
        bool first = true;
        while (is_list_cell(*cell)) {
            if (!first) out += ',';
            first = false;
            print(cell->args[0], namer, out);
            const Term* next = cell->args[1].get();
            if (!is_list_cell(*next)) {
                if (!(next->kind == TermKind::Const && next->name == "[]")) {
                    out += '|';
                    print(cell->args[1], namer, out);
                }
                break;
            }
            cell = next;
        }
        out += ']';
        return;
    }
    int prec = precedence(*t);
    if (prec < 3) {
        auto side = [&](const TermPtr& child, bool right) {
            int cp = precedence(*child);
            bool paren = cp < prec || (right && cp == prec && t->name == "-");
            if (child->kind == TermKind::Int && child->value < 0 && right) paren = true;
            if (paren) out += '(';
            print(child, namer, out);
            if (paren) out += ')';
        };
        side(t->args[0], false);
        out += t->name;
        side(t->args[1], true);
        return;
    }
    out += t->name;
    out += '(';
    for (std::size_t i = 0; i < t->args.size(); ++i) {
        if (i) out += ',';
        print(t->args[i], namer, out);
    }
    out += ')';
}

}  // namespace

std::string to_string(const TermPtr& t, VarNamer* namer) {
    std::string out;
    print(t, namer, out);
    return out;
}

}  // namespace ciff
