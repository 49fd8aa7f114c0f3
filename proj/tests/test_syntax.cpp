#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ciff/syntax.hpp"

using namespace ciff;

TEST_CASE("clauses, abducibles and integrity constraints round-trip") {
    const char* src =
        "% comment\n"
        "abducible(r(_)).\n"
        "abducible(s(_,_)).\n"
        "p(X) :- q(T1,T2), T1 #< X, X #< 8.\n"
        "q(X1,X2) :- s(X1,a).\n"
        "[r(Z)] implies [p(Z)].\n";
    Program p = parse_program(src);
    CHECK(p.clauses.size() == 2);
    CHECK(p.ics.size() == 1);
    CHECK(p.abducibles == std::set<Pred>{{"r", 1}, {"s", 2}});
    std::string printed = to_string(p);
    CHECK(to_string(parse_program(printed)) == printed);
}

TEST_CASE("atoms are classified by kind") {
    Program p = parse_program("abducible(a(_)).\np(X) :- a(X), X #>= 2, X = f(Y), Y \\== b, not(q(X)).\n");
    const auto& body = p.clauses.at(0).body;
    REQUIRE(body.size() == 5);
    CHECK(body[0].atom.kind == AtomKind::Abducible);
    CHECK(body[1].atom.kind == AtomKind::Constraint);
    CHECK(body[1].atom.op == CmpOp::Ge);
    CHECK(body[2].atom.kind == AtomKind::Equality);
    CHECK(body[3].atom.kind == AtomKind::Equality);
    CHECK_FALSE(body[3].positive);
    CHECK(body[4].atom.kind == AtomKind::Defined);
    CHECK_FALSE(body[4].positive);
}

TEST_CASE("arithmetic keeps precedence") {
    Query q = parse_query("X #= 1 + 2 * Y - abs(Z)");
    REQUIRE(q.conjuncts.size() == 1);
    const TermPtr& rhs = q.conjuncts[0].atom.args[1];
    CHECK(rhs->kind == TermKind::Arith);
    CHECK(rhs->op == ArithOp::Sub);
    CHECK(to_string(q) == "X#=1+2*Y-abs(Z)");
}

TEST_CASE("queries share variables by name") {
    Query q = parse_query("[r(Y), s(Y, Z)]");
    REQUIRE(q.conjuncts.size() == 2);
    CHECK(q.conjuncts[0].atom.args[0]->var_id() == q.conjuncts[1].atom.args[0]->var_id());
    CHECK(q.conjuncts[1].atom.args[0]->var_id() != q.conjuncts[1].atom.args[1]->var_id());
    CHECK(parse_query("[]").conjuncts.empty());
    CHECK(parse_query("").conjuncts.empty());
}

TEST_CASE("anonymous variables are distinct") {
    Query q = parse_query("p(_, _)");
    const auto& args = q.conjuncts.at(0).atom.args;
    CHECK(args[0]->var_id() != args[1]->var_id());
}

TEST_CASE("parse errors carry a position") {
    try {
        parse_program("p(X :- q.\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_program("p(X) :- not(not(q(X))).\n"), ParseError);
    CHECK_THROWS_AS(parse_program("[p(X)] implies [not(q(X))].\n"), ParseError);
    CHECK_THROWS_AS(parse_query("p(X) q"), ParseError);
}

TEST_CASE("reserved skolem prefix is rejected") {
    CHECK_THROWS_AS(parse_program("p(sk_1).\n"), ParseError);
}

TEST_CASE("user predicates cover heads, bodies and constraints") {
    Program p = parse_program("p(X) :- q(X).\n[r(Z)] implies [s(Z)].\n");
    auto preds = user_predicates(p);
    CHECK(preds == std::set<Pred>{{"p", 1}, {"q", 1}, {"r", 1}, {"s", 1}});
}

TEST_CASE("multiple sources merge") {
    Program p = parse_program(std::vector<std::string>{"abducible(a).\n", "p :- a.\n"});
    CHECK(p.abducibles.count(Pred{"a", 0}) == 1);
    CHECK(p.clauses.at(0).body.at(0).atom.kind == AtomKind::Abducible);
}
