#include "ciff/syntax.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>

namespace ciff {

const char* cmp_symbol(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "#=";
        case CmpOp::Ne: return "#\\=";
        case CmpOp::Lt: return "#<";
        case CmpOp::Le: return "#=<";
        case CmpOp::Gt: return "#>";
        case CmpOp::Ge: return "#>=";
    }
    return "?";
}

const char* cmp_math(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

std::string to_string(const Pred& p) { return p.name + "/" + std::to_string(p.arity); }

Atom make_true() {
    Atom a;
    a.kind = AtomKind::Truth;
    a.pred = "true";
    return a;
}

Atom make_false() {
    Atom a;
    a.kind = AtomKind::Truth;
    a.pred = "false";
    return a;
}

Atom make_equality(TermPtr lhs, TermPtr rhs) {
    Atom a;
    a.kind = AtomKind::Equality;
    a.pred = "=";
    a.args = {std::move(lhs), std::move(rhs)};
    return a;
}

Atom make_constraint(CmpOp op, TermPtr lhs, TermPtr rhs) {
    Atom a;
    a.kind = AtomKind::Constraint;
    a.op = op;
    a.pred = cmp_symbol(op);
    a.args = {std::move(lhs), std::move(rhs)};
    return a;
}

Atom make_user_atom(std::string pred, std::vector<TermPtr> args, AtomKind kind) {
    Atom a;
    a.kind = kind;
    a.pred = std::move(pred);
    a.args = std::move(args);
    return a;
}

int atom_compare(const Atom& a, const Atom& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    if (a.kind == AtomKind::Constraint && a.op != b.op) return a.op < b.op ? -1 : 1;
    if (int c = a.pred.compare(b.pred)) return c < 0 ? -1 : 1;
    if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (int c = term_compare(a.args[i], b.args[i])) return c;
    return 0;
}

bool atom_equal(const Atom& a, const Atom& b) { return atom_compare(a, b) == 0; }

void collect_vars(const Atom& a, std::set<VarId>& out) {
    for (const auto& t : a.args) collect_vars(t, out);
}

void collect_vars_ordered(const Atom& a, std::vector<VarId>& out) {
    for (const auto& t : a.args) collect_vars_ordered(t, out);
}

Atom substitute(const Atom& a, const Substitution& s) {
    Atom r = a;
    for (auto& t : r.args) t = substitute(t, s);
    return r;
}

Atom rename(const Atom& a, Renamer& r) {
    Atom out = a;
    for (auto& t : out.args) t = r.rename(t);
    return out;
}

bool is_ground(const Atom& a) {
    for (const auto& t : a.args)
        if (!is_ground(t)) return false;
    return true;
}

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Var, Name, Int, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t value = 0;
    int line = 1;
    int col = 1;
};

bool is_reserved_name(const std::string& s) { return s.rfind("sk_", 0) == 0; }

std::vector<Token> lex(const std::string& src) {
    static const char* const ops[] = {"\\==", "#\\=", "#=<", "#>=", ":-", "#=", "#<", "#>",
                                      "=",    "+",    "-",   "*",   "(",  ")",  "[",  "]",
                                      ",",    "|",    "."};
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = src.substr(i, j - i);
            auto res = std::from_chars(src.data() + i, src.data() + j, t.value);
            if (res.ec != std::errc()) throw ParseError("integer literal out of range", line, col);
            advance(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            t.text = src.substr(i, j - i);
            t.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Name;
            advance(j - i);
            out.push_back(t);
            continue;
        }
        bool matched = false;
        for (const char* op : ops) {
            std::size_t n = std::char_traits<char>::length(op);
            if (src.compare(i, n, op) == 0) {
                t.kind = Tok::Punct;
                t.text = op;
                advance(n);
                out.push_back(t);
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

// A parsed conjunct before predicates are classified.
struct RawConjunct {
    enum Kind { Plain, Rel, Not } kind = Plain;
    TermPtr term;           // Plain: the atom as a term
    std::string rel;        // Rel: operator text
    TermPtr lhs, rhs;       // Rel operands
    std::shared_ptr<RawConjunct> inner;  // Not
    int line = 0, col = 0;
};

bool is_rel_op(const std::string& s) {
    return s == "=" || s == "\\==" || s == "#=" || s == "#\\=" || s == "#<" || s == "#=<" || s == "#>" || s == "#>=";
}

class Parser {
public:
    Parser(const std::string& src, VarId* counter) : toks_(lex(src)), counter_(counter) {}

    bool at_end() const { return peek().kind == Tok::End; }
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool is_punct(const char* p, std::size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }

    void expect(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "' but found '" + describe(peek()) + "'");
        ++pos_;
    }

    static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

    void reset_scope() { scope_.clear(); }

    TermPtr variable(const std::string& name) {
        if (name == "_") return make_var("_G", ++*counter_);
        auto it = scope_.find(name);
        if (it != scope_.end()) return it->second;
        auto v = make_var(name, ++*counter_);
        scope_.emplace(name, v);
        return v;
    }

    TermPtr parse_expr() {
        TermPtr lhs = parse_mul();
        while (is_punct("+") || is_punct("-")) {
            std::string op = peek().text;
            ++pos_;
            TermPtr rhs = parse_mul();
            lhs = make_compound(op, {lhs, rhs});
        }
        return lhs;
    }

    TermPtr parse_mul() {
        TermPtr lhs = parse_unary();
        while (is_punct("*")) {
            ++pos_;
            TermPtr rhs = parse_unary();
            lhs = make_compound("*", {lhs, rhs});
        }
        return lhs;
    }

    TermPtr parse_unary() {
        if (is_punct("-")) {
            ++pos_;
            if (peek().kind == Tok::Int) {
                std::int64_t v = peek().value;
                ++pos_;
                return make_int(-v);
            }
            return make_compound("-", {parse_unary()});
        }
        return parse_primary();
    }

    TermPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int:
                ++pos_;
                return make_int(t.value);
            case Tok::Var: {
                std::string name = t.text;
                ++pos_;
                return variable(name);
            }
            case Tok::Name: {
                std::string name = t.text;
                if (is_reserved_name(name)) fail("identifier '" + name + "' uses the reserved sk_ prefix");
                ++pos_;
                if (!is_punct("(")) return make_const(name);
                ++pos_;
                std::vector<TermPtr> args;
                args.push_back(parse_expr());
                while (is_punct(",")) {
                    ++pos_;
                    args.push_back(parse_expr());
                }
                expect(")");
                return make_compound(name, std::move(args));
            }
            case Tok::Punct:
                if (t.text == "(") {
                    ++pos_;
                    TermPtr e = parse_expr();
                    expect(")");
                    return e;
                }
                if (t.text == "[") return parse_list();
                break;
            case Tok::End:
                break;
        }
        fail("unexpected '" + describe(t) + "'");
    }

    TermPtr parse_list() {
        expect("[");
        if (is_punct("]")) {
            ++pos_;
            return make_const("[]");
        }
        std::vector<TermPtr> items;
        items.push_back(parse_expr());
        while (is_punct(",")) {
            ++pos_;
            items.push_back(parse_expr());
        }
        TermPtr tail = make_const("[]");
        if (is_punct("|")) {
            ++pos_;
            tail = parse_expr();
        }
        expect("]");
        for (auto it = items.rbegin(); it != items.rend(); ++it) tail = make_compound(".", {*it, tail});
        return tail;
    }

    RawConjunct parse_conjunct() {
        RawConjunct c;
        c.line = peek().line;
        c.col = peek().col;
        if (is_punct("(")) {
            std::size_t save = pos_;
            try {
                ++pos_;
                RawConjunct inner = parse_conjunct();
                expect(")");
                if (is_punct(",") || is_punct("]") || is_punct(".") || is_punct(")") || at_end()) return inner;
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        if (peek().kind == Tok::Name && peek().text == "not" && is_punct("(", 1)) {
            pos_ += 2;
            auto inner = std::make_shared<RawConjunct>(parse_conjunct());
            expect(")");
            c.kind = RawConjunct::Not;
            c.inner = inner;
            return c;
        }
        TermPtr lhs = parse_expr();
        if (peek().kind == Tok::Punct && is_rel_op(peek().text)) {
            c.kind = RawConjunct::Rel;
            c.rel = peek().text;
            ++pos_;
            c.lhs = lhs;
            c.rhs = parse_expr();
            return c;
        }
        c.kind = RawConjunct::Plain;
        c.term = lhs;
        return c;
    }

    std::vector<RawConjunct> parse_conjunct_list(const char* closer) {
        std::vector<RawConjunct> out;
        if (is_punct(closer)) return out;
        out.push_back(parse_conjunct());
        while (is_punct(",")) {
            ++pos_;
            out.push_back(parse_conjunct());
        }
        return out;
    }

    std::size_t pos_ = 0;

private:
    std::vector<Token> toks_;
    VarId* counter_;
    std::map<std::string, TermPtr> scope_;
};

TermPtr to_arith(const TermPtr& t) {
    if (t->kind == TermKind::Compound) {
        if (t->args.size() == 2 && (t->name == "+" || t->name == "-" || t->name == "*")) {
            ArithOp op = t->name == "+" ? ArithOp::Add : (t->name == "-" ? ArithOp::Sub : ArithOp::Mul);
            return make_arith(op, {to_arith(t->args[0]), to_arith(t->args[1])});
        }
        if (t->args.size() == 1 && t->name == "-") return make_arith(ArithOp::Sub, {make_int(0), to_arith(t->args[0])});
        if (t->args.size() == 1 && t->name == "abs") return make_arith(ArithOp::Abs, {to_arith(t->args[0])});
    }
    return t;
}

CmpOp cmp_from_text(const std::string& s) {
    if (s == "#=") return CmpOp::Eq;
    if (s == "#\\=") return CmpOp::Ne;
    if (s == "#<") return CmpOp::Lt;
    if (s == "#=<") return CmpOp::Le;
    if (s == "#>") return CmpOp::Gt;
    return CmpOp::Ge;
}

// Turns raw conjuncts into literals and records predicate usage.
class Classifier {
public:
    explicit Classifier(const std::set<Pred>* abducibles) : abducibles_(abducibles) {}

    Atom atom_of_term(const TermPtr& t, int line, int col) {
        if (t->kind == TermKind::Const) {
            if (t->name == "true") return make_true();
            if (t->name == "false") return make_false();
            return user_atom(t->name, {}, line, col);
        }
        if (t->kind == TermKind::Compound) {
            if (t->name == "+" || t->name == "-" || t->name == "*" || t->name == ".")
                throw ParseError("expected an atom, found the term '" + to_string(t) + "'", line, col);
            return user_atom(t->name, t->args, line, col);
        }
        throw ParseError("expected an atom, found '" + to_string(t) + "'", line, col);
    }

    Atom user_atom(const std::string& name, const std::vector<TermPtr>& args, int line, int col) {
        if (name == "true" || name == "false" || name == "not" || name == "implies")
            throw ParseError("'" + name + "' cannot be used with arguments as a predicate", line, col);
        note(Pred{name, args.size()}, line, col);
        AtomKind k = abducibles_ && abducibles_->count(Pred{name, args.size()}) ? AtomKind::Abducible : AtomKind::Defined;
        return make_user_atom(name, args, k);
    }

    Literal literal(const RawConjunct& c) {
        switch (c.kind) {
            case RawConjunct::Plain:
                return Literal{atom_of_term(c.term, c.line, c.col), true};
            case RawConjunct::Not: {
                Literal inner = literal(*c.inner);
                if (!inner.positive) throw ParseError("nested negation is not supported", c.line, c.col);
                if (inner.atom.kind == AtomKind::Constraint)
                    throw ParseError("constraint atoms cannot be negated; use the complementary operator", c.line, c.col);
                return Literal{inner.atom, false};
            }
            case RawConjunct::Rel:
                if (c.rel == "=") return Literal{make_equality(c.lhs, c.rhs), true};
                if (c.rel == "\\==") return Literal{make_equality(c.lhs, c.rhs), false};
                return Literal{make_constraint(cmp_from_text(c.rel), to_arith(c.lhs), to_arith(c.rhs)), true};
        }
        throw ParseError("unreachable", c.line, c.col);
    }

    void note(const Pred& p, int line, int col) {
        auto [it, inserted] = arity_.emplace(p.name, p.arity);
        if (!inserted && it->second != p.arity)
            throw ParseError("predicate '" + p.name + "' used with arities " + std::to_string(it->second) + " and " +
                                 std::to_string(p.arity),
                             line, col);
    }

    void set_abducibles(const std::set<Pred>* a) { abducibles_ = a; }

private:
    const std::set<Pred>* abducibles_;
    std::map<std::string, std::size_t> arity_;
};

struct RawClause {
    RawConjunct head;
    std::vector<RawConjunct> body;
};

struct RawIc {
    std::vector<RawConjunct> body;
    std::vector<RawConjunct> head;
};

void reclassify(Atom& a, const std::set<Pred>& abducibles) {
    if (a.is_user()) a.kind = abducibles.count(a.predicate()) ? AtomKind::Abducible : AtomKind::Defined;
}

}  // namespace

Program parse_program(const std::vector<std::string>& sources) {
    VarId counter = 0;
    std::vector<RawClause> clauses;
    std::vector<RawIc> ics;
    std::set<Pred> abducibles;
    Classifier cls(nullptr);

    for (const auto& src : sources) {
        Parser p(src, &counter);
        while (!p.at_end()) {
            p.reset_scope();
            if (p.is_punct("[")) {
                p.expect("[");
                RawIc ic;
                ic.body = p.parse_conjunct_list("]");
                p.expect("]");
                if (!(p.peek().kind == Tok::Name && p.peek().text == "implies")) p.fail("expected 'implies'");
                ++p.pos_;
                p.expect("[");
                ic.head = p.parse_conjunct_list("]");
                p.expect("]");
                p.expect(".");
                if (ic.body.empty() && ic.head.empty()) p.fail("an integrity constraint needs at least one conjunct");
                ics.push_back(std::move(ic));
                continue;
            }
            RawConjunct head = p.parse_conjunct();
            if (head.kind == RawConjunct::Plain && head.term->kind == TermKind::Compound && head.term->name == "abducible" &&
                head.term->args.size() == 1 && p.is_punct(".")) {
                const TermPtr& tmpl = head.term->args[0];
                if (tmpl->kind != TermKind::Const && tmpl->kind != TermKind::Compound)
                    throw ParseError("abducible declaration expects a predicate template", head.line, head.col);
                Pred pr{tmpl->name, tmpl->args.size()};
                if (pr.name == "true" || pr.name == "false")
                    throw ParseError("reserved predicate '" + pr.name + "' cannot be abducible", head.line, head.col);
                cls.note(pr, head.line, head.col);
                abducibles.insert(pr);
                p.expect(".");
                continue;
            }
            if (head.kind != RawConjunct::Plain)
                throw ParseError("clause head must be an ordinary atom, not an equality, constraint or negation", head.line,
                                 head.col);
            RawClause rc;
            rc.head = head;
            if (p.is_punct(":-")) {
                ++p.pos_;
                rc.body = p.parse_conjunct_list(".");
                if (rc.body.empty()) p.fail("empty clause body");
            }
            p.expect(".");
            clauses.push_back(std::move(rc));
        }
    }

    cls.set_abducibles(&abducibles);
    Program prog;
    prog.abducibles = abducibles;
    for (const auto& rc : clauses) {
        Clause c;
        const TermPtr& h = rc.head.term;
        if (h->kind == TermKind::Const && (h->name == "true" || h->name == "false"))
            throw ParseError("reserved predicate '" + h->name + "' cannot be defined", rc.head.line, rc.head.col);
        c.head = cls.atom_of_term(h, rc.head.line, rc.head.col);
        if (c.head.kind == AtomKind::Abducible)
            throw ParseError("abducible predicate " + to_string(c.head.predicate()) + " cannot head a clause", rc.head.line,
                             rc.head.col);
        for (const auto& b : rc.body) c.body.push_back(cls.literal(b));
        prog.clauses.push_back(std::move(c));
    }
    for (const auto& ri : ics) {
        IntegrityConstraint ic;
        for (const auto& b : ri.body) ic.body.push_back(cls.literal(b));
        for (const auto& h : ri.head) {
            Literal l = cls.literal(h);
            if (!l.positive) throw ParseError("integrity constraint heads must be atoms", h.line, h.col);
            ic.head.push_back(l.atom);
        }
        if (ic.head.empty()) ic.head.push_back(make_false());
        prog.ics.push_back(std::move(ic));
    }
    for (auto& c : prog.clauses) {
        reclassify(c.head, abducibles);
        for (auto& l : c.body) reclassify(l.atom, abducibles);
    }
    for (auto& ic : prog.ics) {
        for (auto& l : ic.body) reclassify(l.atom, abducibles);
        for (auto& a : ic.head) reclassify(a, abducibles);
    }
    return prog;
}

Program parse_program(const std::string& source) { return parse_program(std::vector<std::string>{source}); }

Query parse_query(const std::string& text, const std::set<Pred>& abducibles, VarId first_var_id) {
    VarId counter = first_var_id;
    Parser p(text, &counter);
    Classifier cls(&abducibles);
    Query q;
    std::vector<RawConjunct> raw;
    if (p.is_punct("[")) {
        // Either a bracketed conjunct list or a leading list term; the
        // bracketed form is the documented one.
        p.expect("[");
        raw = p.parse_conjunct_list("]");
        p.expect("]");
    } else if (!p.at_end()) {
        raw = p.parse_conjunct_list(".");
    }
    if (p.is_punct(".")) p.expect(".");
    if (!p.at_end()) p.fail("unexpected '" + Parser::describe(p.peek()) + "' after query");
    for (const auto& r : raw) q.conjuncts.push_back(cls.literal(r));
    return q;
}

std::vector<Atom> parse_atom_list(const std::string& text, const std::set<Pred>& abducibles) {
    Query q = parse_query(text, abducibles);
    std::vector<Atom> out;
    for (auto& l : q.conjuncts) {
        if (!l.positive) throw ParseError("expected atoms only", 1, 1);
        out.push_back(l.atom);
    }
    return out;
}

std::string to_string(const Atom& a, VarNamer* namer) {
    switch (a.kind) {
        case AtomKind::Truth:
            return a.pred;
        case AtomKind::Equality:
            return to_string(a.args[0], namer) + "=" + to_string(a.args[1], namer);
        case AtomKind::Constraint:
            return to_string(a.args[0], namer) + cmp_symbol(a.op) + to_string(a.args[1], namer);
        case AtomKind::Defined:
        case AtomKind::Abducible:
            break;
    }
    std::string out = a.pred;
    if (!a.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) out += ',';
            out += to_string(a.args[i], namer);
        }
        out += ')';
    }
    return out;
}

std::string to_string(const Literal& l, VarNamer* namer) {
    if (l.positive) return to_string(l.atom, namer);
    if (l.atom.kind == AtomKind::Equality)
        return to_string(l.atom.args[0], namer) + "\\==" + to_string(l.atom.args[1], namer);
    return "not(" + to_string(l.atom, namer) + ")";
}

namespace {

std::string join_literals(const std::vector<Literal>& ls, VarNamer& n) {
    std::string out;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (i) out += ", ";
        out += to_string(ls[i], &n);
    }
    return out;
}

}  // namespace

std::string to_string(const Clause& c) {
    VarNamer n;
    std::string out = to_string(c.head, &n);
    if (!c.body.empty()) out += " :- " + join_literals(c.body, n);
    return out + ".";
}

std::string to_string(const IntegrityConstraint& ic) {
    VarNamer n;
    std::string out = "[" + join_literals(ic.body, n) + "] implies [";
    for (std::size_t i = 0; i < ic.head.size(); ++i) {
        if (i) out += ", ";
        out += to_string(ic.head[i], &n);
    }
    return out + "].";
}

std::string to_string(const Program& p) {
    std::string out;
    for (const auto& a : p.abducibles) {
        out += "abducible(" + a.name;
        if (a.arity) {
            out += '(';
            for (std::size_t i = 0; i < a.arity; ++i) out += i ? ",_" : "_";
            out += ')';
        }
        out += ").\n";
    }
    for (const auto& c : p.clauses) out += to_string(c) + "\n";
    for (const auto& ic : p.ics) out += to_string(ic) + "\n";
    return out;
}

std::string to_string(const Query& q) {
    if (q.conjuncts.empty()) return "[]";
    VarNamer n;
    return join_literals(q.conjuncts, n);
}

namespace {

void add_user(const Atom& a, std::set<Pred>& out) {
    if (a.is_user()) out.insert(a.predicate());
}

}  // namespace

std::set<Pred> user_predicates(const Program& p) {
    std::set<Pred> out;
    for (const auto& c : p.clauses) {
        add_user(c.head, out);
        for (const auto& l : c.body) add_user(l.atom, out);
    }
    for (const auto& ic : p.ics) {
        for (const auto& l : ic.body) add_user(l.atom, out);
        for (const auto& a : ic.head) add_user(a, out);
    }
    for (const auto& a : p.abducibles) out.insert(a);
    return out;
}

std::set<Pred> user_predicates(const Query& q) {
    std::set<Pred> out;
    for (const auto& l : q.conjuncts) add_user(l.atom, out);
    return out;
}

}  // namespace ciff
