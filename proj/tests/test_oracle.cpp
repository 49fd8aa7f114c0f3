#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ciff/allowedness.hpp"
#include "ciff/completion.hpp"
#include "ciff/oracle.hpp"

using namespace ciff;

namespace {

std::vector<std::string> render(const std::vector<std::vector<Atom>>& sets) {
    std::vector<std::string> out;
    for (const auto& s : sets) {
        std::string x;
        for (const auto& a : s) x += (x.empty() ? "" : " ") + to_string(a);
        out.push_back("{" + x + "}");
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("Kleene connectives") {
    const Truth F = Truth::False, U = Truth::Undefined, T = Truth::True;
    CHECK(kleene_not(U) == U);
    CHECK(kleene_not(T) == F);
    CHECK(kleene_and(U, F) == F);
    CHECK(kleene_and(U, T) == U);
    CHECK(kleene_or(U, T) == T);
    CHECK(kleene_or(U, F) == U);
}

TEST_CASE("three-valued fixpoint") {
    Program p = parse_program("p :- not(p).\nq :- not(r).\ns :- q.\n");
    Interpretation I = fitting_fixpoint(p, {});
    CHECK(I.truth.at("p") == Truth::Undefined);
    CHECK(I.truth.at("q") == Truth::True);
    CHECK(I.truth.at("s") == Truth::True);
    CHECK(I.truth.at("r") == Truth::False);
    CHECK_FALSE(I.two_valued());
    CHECK_THROWS_AS(fitting_fixpoint(parse_program("p(X) :- q(X).\n"), {}), NotGround);
}

TEST_CASE("abducibles are true exactly when chosen") {
    Program p = parse_program("abducible(a).\np :- a.\nq :- not(a).\n");
    Interpretation with = fitting_fixpoint(p, parse_atom_list("a", p.abducibles));
    CHECK(with.truth.at("p") == Truth::True);
    CHECK(with.truth.at("q") == Truth::False);
    Interpretation without = fitting_fixpoint(p, {});
    CHECK(without.truth.at("p") == Truth::False);
    CHECK(without.truth.at("q") == Truth::True);
}

TEST_CASE("answer checking") {
    Program p = parse_program("abducible(a(_)).\np(Z) :- a(Z), Z #< 5.\n[a(2)] implies [false].\n");
    Query q = parse_query("p(Y)", p.abducibles);
    OracleOptions opts;
    opts.hi = 6;
    VarId y = q.conjuncts[0].atom.args[0]->var_id();
    CHECK(check_abductive_answer(p, q, parse_atom_list("a(1)", p.abducibles), {{y, make_int(1)}}, opts).kind ==
          OracleVerdict::Valid);
    CHECK(check_abductive_answer(p, q, parse_atom_list("a(2)", p.abducibles), {{y, make_int(2)}}, opts).kind ==
          OracleVerdict::Invalid);
    CHECK(check_abductive_answer(p, q, parse_atom_list("a(6)", p.abducibles), {{y, make_int(6)}}, opts).kind ==
          OracleVerdict::Invalid);
    CHECK(check_abductive_answer(p, q, parse_atom_list("a(6)", p.abducibles), {}, opts).kind == OracleVerdict::Invalid);
    CHECK(check_abductive_answer(p, q, parse_atom_list("a(6), a(3)", p.abducibles), {}, opts).kind ==
          OracleVerdict::Valid);
}

TEST_CASE("undefined query truth makes a check inapplicable") {
    Program p = parse_program("abducible(a).\np :- not(p), a.\n");
    Query q = parse_query("p", p.abducibles);
    CHECK(check_abductive_answer(p, q, parse_atom_list("a", p.abducibles), {}).kind == OracleVerdict::Inapplicable);
}

TEST_CASE("enumeration and minimality") {
    Program p = parse_program("abducible(a).\nabducible(b).\np :- a.\np :- b.\n[a, b] implies [false].\n");
    Query q = parse_query("p", p.abducibles);
    Enumeration e = enumerate_answers(p, q);
    CHECK(e.base_size == 2);
    CHECK(e.two_valued);
    CHECK(render(e.answers) == std::vector<std::string>{"{a}", "{b}"});
    CHECK(render(minimal_answers({parse_atom_list("a, b"), parse_atom_list("a")})) == std::vector<std::string>{"{a}"});
}

TEST_CASE("the abducible base is bounded") {
    Program p = parse_program("abducible(a(_,_,_)).\np :- a(X,Y,Z).\n");
    Query q = parse_query("p", p.abducibles);
    CHECK_THROWS_AS(enumerate_answers(p, q), BoundExceeded);
}

TEST_CASE("random frameworks are reproducible and parse") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomFramework a = random_framework(seed), b = random_framework(seed);
        CHECK(a.program == b.program);
        CHECK(a.query == b.query);
        Program p = parse_program(a.program);
        CHECK_NOTHROW(parse_query(a.query, p.abducibles));
    }
    RandomOptions ground;
    ground.ground = true;
    ground.constraints = false;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomFramework f = random_framework(seed, ground);
        Program p = parse_program(f.program);
        for (const auto& c : p.clauses) CHECK(is_ground(c.head));
    }
    RandomOptions allowed;
    allowed.statically_allowed = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomFramework f = random_framework(seed, allowed);
        Program p = parse_program(f.program);
        Query q = parse_query(f.query, p.abducibles);
        CHECK(check_statically_allowed(complete(p, user_predicates(q)), q).violations.empty());
    }
}
