#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ciff/answers.hpp"
#include "ciff/benchmarks.hpp"
#include "ciff/engine.hpp"

using namespace ciff;

namespace {

struct Run {
    Program program;
    Query query;
    CiffTheory theory;
    DerivationResult result;
};

Run derive(const std::string& program, const std::string& query, EngineConfig cfg = {}) {
    Run r;
    r.program = parse_program(program);
    r.query = parse_query(query, r.program.abducibles);
    r.theory = complete(r.program, user_predicates(r.query));
    Engine e(r.theory, cfg);
    r.result = e.derive(r.query);
    return r;
}

bool used(const DerivationResult& d, int rule) { return std::find(d.rules.begin(), d.rules.end(), rule) != d.rules.end(); }

std::vector<std::string> answers(const DerivationResult& d) {
    std::vector<std::string> out;
    for (const Node* n : d.successes()) out.push_back(format_answer(extract(*n)));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("rule names") {
    CHECK(rule_name(kInit) == "Init");
    CHECK(rule_name(1) == "R1");
    CHECK(rule_name(18) == "R18");
}

TEST_CASE("initial node holds the query and the integrity constraints") {
    Program p = parse_program("abducible(a(_)).\n[a(X)] implies [false].\n");
    Query q = parse_query("a(Y), Y #> 1", p.abducibles);
    CiffTheory th = complete(p, user_predicates(q));
    Engine e(th, {});
    Node n = e.initial_node(q);
    REQUIRE(n.conjuncts.size() == 3);
    CHECK(n.conjuncts[0].is_atomic());
    CHECK(n.conjuncts[2].is_implication());
    std::set<ConjunctId> ids;
    for (const auto& c : n.conjuncts) ids.insert(c.id);
    CHECK(ids.size() == 3);
}

TEST_CASE("unfolding a defined atom branches over its clauses") {
    Run r = derive("abducible(a).\nabducible(b).\np :- a.\np :- b.\n", "p");
    CHECK(used(r.result, 1));
    CHECK(used(r.result, 4));
    CHECK(answers(r.result) == std::vector<std::string>{"[a], [], []", "[b], [], []"});
}

TEST_CASE("propagation with an abducible fires an integrity constraint") {
    Run r = derive("abducible(a).\nabducible(b).\n[a] implies [b].\n", "a");
    CHECK(used(r.result, 3));
    CHECK(answers(r.result) == std::vector<std::string>{"[a, b], [], []"});
}

TEST_CASE("constraint solving fails inconsistent branches") {
    Run r = derive("abducible(a(_)).\n", "a(X), X #< 1, X #> 2");
    CHECK(r.result.status == DerivationResult::Failure);
    CHECK(r.result.successes().empty());
}

TEST_CASE("negative literals become implications") {
    Run r = derive("abducible(a).\nabducible(b).\nq :- a.\n", "not(q), b");
    CHECK(r.result.status == DerivationResult::Success);
    CHECK(answers(r.result) == std::vector<std::string>{"[b], [], []"});
    Run bad = derive("abducible(a).\nq :- a.\n", "not(q), a");
    CHECK(bad.result.status == DerivationResult::Failure);
}

TEST_CASE("factoring separates equal and distinct abducibles") {
    Run r = derive("abducible(a(_)).\n[a(X), a(Y), X \\== Y] implies [false].\n", "a(U), a(V)");
    CHECK(used(r.result, 5));
    CHECK(r.result.status == DerivationResult::Success);
    for (const Node* n : r.result.successes()) CHECK(extract(*n).delta.size() == 1);
}

TEST_CASE("equalities are rewritten and substituted") {
    Run r = derive("p(f(X), X).\n", "p(f(a), Y)");
    CHECK(used(r.result, 8));
    CHECK(used(r.result, 10));
    REQUIRE(r.result.successes().size() == 1);
    ExtractedAnswer a = extract(*r.result.successes()[0]);
    CHECK(a.delta.empty());
    Run clash = derive("p(f(X)).\n", "p(g(a))");
    CHECK(clash.result.status == DerivationResult::Failure);
}

TEST_CASE("a constraint over a universal variable leads to undefined") {
    Run r = derive("abducible(a(_)).\n[V #> 2] implies [a(V)].\n", "[]");
    CHECK(r.result.status == DerivationResult::Undefined);
    CHECK(r.result.rules.back() == 18);
}

TEST_CASE("depth-first search loops where fair search succeeds") {
    const char* prog = "abducible(a).\nq :- p.\nq :- a.\np :- p.\n";
    EngineConfig dfs;
    dfs.max_steps = 500;
    dfs.max_answers = 1;
    CHECK(derive(prog, "q", dfs).result.status == DerivationResult::BudgetExhausted);
    EngineConfig fair = dfs;
    fair.fair = true;
    Run r = derive(prog, "q", fair);
    CHECK(r.result.status == DerivationResult::Success);
    CHECK(answers(r.result) == std::vector<std::string>{"[a], [], []"});
}

TEST_CASE("budgets are reported") {
    EngineConfig cfg;
    cfg.max_steps = 50;
    Run r = derive("p :- p.\n", "p", cfg);
    CHECK(r.result.budget_exhausted);
    CHECK(r.result.status == DerivationResult::BudgetExhausted);
    CHECK(r.result.steps <= 51);
}

TEST_CASE("max_answers stops the derivation") {
    EngineConfig cfg;
    cfg.max_answers = 1;
    Run r = derive(coloring_program(triangle(), 3), "[]", cfg);
    CHECK(r.result.successes().size() == 1);
}

TEST_CASE("derivations are deterministic") {
    Run a = derive(webrepair_program(), "[]");
    Run b = derive(webrepair_program(), "[]");
    CHECK(a.result.rules == b.result.rules);
    CHECK(answers(a.result) == answers(b.result));
}

TEST_CASE("parallel workers find the same answers") {
    EngineConfig par;
    par.parallel = 3;
    for (const std::string& prog : {coloring_program(triangle(), 3), webrepair_program()}) {
        Run seq = derive(prog, "[]");
        Run p = derive(prog, "[]", par);
        CHECK(p.result.status == seq.result.status);
        CHECK(answers(p.result) == answers(seq.result));
    }
}

TEST_CASE("quantifier discipline holds at every step") {
    EngineConfig cfg;
    cfg.check_invariants = true;
    for (const std::string& prog : {webrepair_program(), nqueens_program(4)}) {
        Run r = derive(prog, prog == webrepair_program() ? "[]" : nqueens_query(4), cfg);
        CHECK(r.result.invariant_violations.empty());
    }
}

TEST_CASE("observer sees every rule application") {
    std::size_t events = 0;
    EngineConfig cfg;
    cfg.observer = [&](const StepEvent&) { ++events; };
    Run r = derive(webrepair_program(), "[]", cfg);
    CHECK(events + 1 == r.result.rules.size());
}

TEST_CASE("trace lists one formula per step") {
    EngineConfig cfg;
    cfg.trace = true;
    Run r = derive("abducible(a(_)).\np(Z) :- a(Z), Z #< 5.\n[a(2)] implies [false].\n", "p(Y)", cfg);
    REQUIRE(r.result.trace.size() == r.result.rules.size());
    CHECK(r.result.trace.front().rule == kInit);
    CHECK(r.result.trace.front().formula.find("p(Y)") != std::string::npos);
}

TEST_CASE("query arity must match the program") {
    Program p = parse_program("p(X) :- q(X).\n");
    CHECK_THROWS_AS(check_query_against_program(p, parse_query("p(a, b)")), std::invalid_argument);
    CHECK_NOTHROW(check_query_against_program(p, parse_query("p(a)")));
}

TEST_CASE("pregrounding instantiates constraints over fact tables") {
    Program p = parse_program("abducible(a(_)).\nn(1).\nn(2).\n[n(X)] implies [a(X)].\n");
    Program g = preground(p);
    REQUIRE(g.ics.size() == 2);
    for (const auto& ic : g.ics) {
        for (const auto& l : ic.body) CHECK(is_ground(l.atom));
    }
    Query q;
    CiffTheory th = complete(g, {});
    Engine e(th, {});
    DerivationResult d = e.derive(q);
    REQUIRE(d.successes().size() == 1);
    CHECK(format_answer(extract(*d.successes()[0])) == "[a(1), a(2)], [], []");
}

TEST_CASE("applicable lists rules in priority order") {
    Program p = parse_program("abducible(a(_)).\np(X) :- a(X).\n");
    Query q = parse_query("p(Y), Y = 1", p.abducibles);
    CiffTheory th = complete(p, user_predicates(q));
    Engine e(th, {});
    Node n = e.initial_node(q);
    auto apps = e.applicable(n);
    REQUIRE(apps.size() >= 2);
    auto sel = e.select(n);
    REQUIRE(sel);
    CHECK(sel->rule == apps.front().rule);
    CHECK(apps.front().rule == 10);
}
