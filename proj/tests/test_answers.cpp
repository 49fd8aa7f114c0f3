#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "ciff/answers.hpp"
#include "ciff/benchmarks.hpp"
#include "ciff/engine.hpp"

using namespace ciff;

namespace {

DerivationResult run(const std::string& program, const std::string& query, CiffTheory& th) {
    Program p = parse_program(program);
    Query q = parse_query(query, p.abducibles);
    th = complete(p, user_predicates(q));
    Engine e(th, {});
    return e.derive(q);
}

const char* kExample =
    "abducible(r(_)).\nabducible(s(_,_)).\n"
    "p(X) :- q(T1,T2), T1 #< X, X #< 8.\nq(X1,X2) :- s(X1,a).\n[r(Z)] implies [p(Z)].\n";

}  // namespace

TEST_CASE("answer parts are sorted into their slots") {
    CiffTheory th;
    DerivationResult d = run(kExample, "r(Y)", th);
    REQUIRE(d.successes().size() == 1);
    const Node& leaf = *d.successes()[0];
    ExtractedAnswer a = extract(leaf);
    CHECK(a.delta.size() == 2);
    CHECK(a.gamma.size() == 4);
    CHECK(a.equalities.size() == 1);
    CHECK(a.disequalities.empty());
    CHECK(check_extraction(leaf, a).empty());
    CHECK(format_answer(a) == "[r(X), s(X1,a)], [], [Y#=X, T1#=X1, X1#<X, X#<8]");
    CHECK(format_answer(a, true).find("T2=") != std::string::npos);
}

TEST_CASE("disequalities come from implications X = t -> false") {
    CiffTheory th;
    DerivationResult d = run(webrepair_program(), "[]", th);
    REQUIRE(d.successes().size() == 2);
    ExtractedAnswer a = extract(*d.successes()[0]);
    CHECK(a.disequalities.size() == 2);
    for (const auto& de : a.disequalities) CHECK(de.var->is_var());
}

TEST_CASE("extraction rejects failed and undefined leaves") {
    Node failed;
    failed.conjuncts.push_back(make_atomic(1, make_false()));
    CHECK_THROWS_AS(extract(failed), NotSuccessful);
    Node undefined;
    undefined.undefined = true;
    CHECK_THROWS_AS(extract(undefined), NotSuccessful);
}

TEST_CASE("grounding labels constraint variables and names the rest") {
    CiffTheory th;
    DerivationResult d = run(kExample, "r(6)", th);
    REQUIRE(d.successes().size() == 1);
    ExtractedAnswer a = extract(*d.successes()[0]);
    SolverConfig cfg;
    cfg.lo = 0;
    cfg.hi = 10;
    std::vector<GroundAnswer> all;
    bool complete_run = ground_answer(a, cfg, [&](const GroundAnswer& g) {
        all.push_back(g);
        return true;
    });
    CHECK(complete_run);
    CHECK(all.size() == 6);
    for (const auto& g : all) {
        REQUIRE(g.delta.size() == 2);
        for (const auto& atom : g.delta) CHECK(is_ground(atom));
        const Atom& s = g.delta[0].pred == "s" ? g.delta[0] : g.delta[1];
        CHECK(s.args[0]->value < 6);
    }
    CHECK_FALSE(all[0].skolems.empty());
    CHECK(all[0].skolems.begin()->first.rfind("sk_", 0) == 0);
}

TEST_CASE("grounding respects disequalities") {
    CiffTheory th;
    DerivationResult d = run(webrepair_program(), "[]", th);
    REQUIRE(d.successes().size() == 2);
    ExtractedAnswer a = extract(*d.successes()[1]);
    int count = 0;
    ground_answer(a, {}, [&](const GroundAnswer& g) {
        std::set<std::string> nodes;
        for (const auto& atom : g.delta)
            if (atom.pred == "add_node") nodes.insert(to_string(atom.args[0]));
        CHECK(nodes.size() == 2);
        CHECK_FALSE(nodes.count("n1"));
        CHECK_FALSE(nodes.count("n3"));
        ++count;
        return true;
    });
    CHECK(count == 1);
}

TEST_CASE("json output") {
    CiffTheory th;
    DerivationResult d = run(kExample, "r(Y)", th);
    REQUIRE(d.successes().size() == 1);
    ExtractedAnswer a = extract(*d.successes()[0]);
    auto j = nlohmann::json::parse(answer_json(a));
    CHECK(j["status"] == "success");
    CHECK(j["abducibles"].size() == 2);
    CHECK(j["constraints"].size() == 4);
    CHECK_FALSE(j.contains("equalities"));
    CHECK(nlohmann::json::parse(answer_json(a, true))["equalities"].size() == 1);
    CHECK(status_json("undefined") == R"({"status":"undefined"})");
}
