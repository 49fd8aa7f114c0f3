// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "ciff/answers.hpp"
#include "ciff/benchmarks.hpp"
#include "ciff/corpus.hpp"
#include "ciff/engine.hpp"
#include "ciff/oracle.hpp"
#include "support/reference.hpp"

using namespace ciff;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    std::string errors;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        errors += (pass ? "" : "; ") + what;
        pass = false;
    }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    auto start = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.2f s) %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), since(start),
                (o.pass ? o.detail.str() : o.errors).c_str());
    std::fflush(stdout);
}

struct Loaded {
    Program program;
    Query query;
    CiffTheory theory;
};

Loaded load(const std::string& program, const std::string& query) {
    Loaded l;
    l.program = parse_program(program);
    l.query = parse_query(query, l.program.abducibles);
    l.theory = complete(l.program, user_predicates(l.query));
    return l;
}

std::vector<std::string> rule_names(const DerivationResult& d) {
    std::vector<std::string> out;
    for (int r : d.rules) out.push_back(rule_name(r));
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
    return s;
}

std::string corpus_program(const std::string& name) { return load_case(std::string(CIFF_CORPUS_DIR) + "/" + name).program; }

// Every distinct ground abducible set reachable by labeling the answers.
std::set<std::set<std::string>> labeled_deltas(const DerivationResult& d, const SolverConfig& cfg, std::size_t limit) {
    std::set<std::set<std::string>> out;
    for (const Node* n : d.successes()) {
        ground_answer(extract(*n), cfg, [&](const GroundAnswer& g) {
            std::set<std::string> s;
            for (const auto& a : g.delta) s.insert(to_string(a));
            out.insert(s);
            return out.size() < limit;
        });
        if (out.size() >= limit) break;
    }
    return out;
}

std::vector<int> queens_columns(const std::vector<Atom>& delta, int n, bool& well_formed) {
    std::vector<int> col(n, 0);
    well_formed = static_cast<int>(delta.size()) == n;
    for (const auto& a : delta) {
        if (a.pred != "q_pos" || a.args.size() != 2 || a.args[0]->kind != TermKind::Int ||
            a.args[1]->kind != TermKind::Int) {
            well_formed = false;
            continue;
        }
        auto r = a.args[0]->value, c = a.args[1]->value;
        if (r < 1 || r > n || col[r - 1] != 0) well_formed = false;
        else col[r - 1] = static_cast<int>(c);
    }
    return col;
}

void criterion_example1(Outcome& o) {
    auto start = Clock::now();
    Loaded l = load(corpus_program("example1"), "r(Y)");
    Engine e(l.theory, {});
    DerivationResult d = e.derive(l.query);
    std::vector<std::string> want{"Init", "R3", "R11", "R17", "R1", "R10", "R1", "R10"};
    o.require(rule_names(d) == want, "trace " + join(rule_names(d)));
    o.require(d.successes().size() == 1, std::to_string(d.successes().size()) + " answers");
    if (d.successes().size() == 1) {
        ExpectedAnswer x{{"r(X)", "s(V,a)"}, {"Y = X", "T1 = V", "V #< X", "X #< 8"}, {"T2 = W"}, {}};
        ExtractedAnswer a = extract(*d.successes()[0]);
        o.require(alpha_equivalent(a, x, true), "answer " + format_answer(a, true));
    }
    o.require(since(start) < 1.0, "slower than 1 s");
}

void criterion_case_analysis(Outcome& o) {
    auto start = Clock::now();
    Loaded l = load(corpus_program("a2"), "p(Y)");
    std::vector<Node> before_r6;
    EngineConfig cfg;
    cfg.observer = [&](const StepEvent& ev) {
        if (ev.rule == 6 && ev.before) before_r6.push_back(*ev.before);
    };
    Engine e(l.theory, cfg);
    DerivationResult d = e.derive(l.query);
    std::vector<std::string> want{"Init", "R1", "R3", "R9", "R6", "R4", "R17"};
    o.require(rule_names(d) == want, "trace " + join(rule_names(d)));
    o.require(d.successes().size() == 1 && d.failures == 1,
              std::to_string(d.successes().size()) + " answers, " + std::to_string(d.failures) + " failures");
    if (d.successes().size() == 1) {
        ExpectedAnswer x{{"a(Z)"}, {"Y = Z", "Z #< 5", "Z #\\= 2"}, {}, {}};
        ExtractedAnswer a = extract(*d.successes()[0]);
        o.require(alpha_equivalent(a, x), "answer " + format_answer(a));
    }
    o.require(before_r6.size() == 1, "R6 applied " + std::to_string(before_r6.size()) + " times");
    if (before_r6.size() == 1) {
        Engine probe(l.theory, {});
        auto apps = probe.applicable(before_r6[0]);
        bool only_r6 = !apps.empty();
        for (const auto& s : apps) only_r6 &= s.rule == 6;
        o.require(only_r6, "rules other than R6 apply at the case-analysis step");
    }
    o.require(since(start) < 1.0, "slower than 1 s");
}

void criterion_undefined(Outcome& o) {
    Loaded l = load("abducible(a(_)).\np(Y) :- a(Y).\n[V #> 2] implies [a(V)].\n", "[]");
    Engine e(l.theory, {});
    DerivationResult d = e.derive(l.query);
    o.require(d.status == DerivationResult::Undefined, std::string("status ") + status_name(d.status));
    o.require(rule_names(d) == std::vector<std::string>{"Init", "R18"}, "trace " + join(rule_names(d)));
}

void criterion_webrepair(Outcome& o) {
    auto start = Clock::now();
    Loaded l = load(webrepair_program(), "[]");
    Engine e(l.theory, {});
    DerivationResult d = e.derive(l.query);
    o.require(d.status == DerivationResult::Success && !d.budget_exhausted, std::string("status ") + status_name(d.status));
    auto succ = d.successes();
    o.require(succ.size() == 2, std::to_string(succ.size()) + " answers");
    if (succ.size() == 2) {
        ExpectedAnswer first{{"add_link(n1,L)", "add_node(L,lib)"}, {}, {}, {"L \\== n3", "L \\== n1"}};
        ExpectedAnswer second{{"add_link(n1,L)", "add_node(L,lib)", "add_link(n1,R)", "add_node(R,review)"},
                              {},
                              {},
                              {"L \\== n3", "L \\== n1", "R \\== n3", "R \\== n1", "R \\== L"}};
        ExtractedAnswer a0 = extract(*succ[0]), a1 = extract(*succ[1]);
        o.require(alpha_equivalent(a0, first), "first answer " + format_answer(a0));
        o.require(alpha_equivalent(a1, second), "second answer " + format_answer(a1));
    }
    o.require(since(start) < 5.0, "slower than 5 s");
}

void criterion_nqueens(Outcome& o) {
    for (int n : {4, 6, 8, 12}) {
        auto start = Clock::now();
        Loaded l = load(nqueens_program(n), nqueens_query(n));
        EngineConfig cfg;
        cfg.max_answers = 1;
        cfg.max_steps = 2'000'000;
        Engine e(l.theory, cfg);
        DerivationResult d = e.derive(l.query);
        bool found = false;
        for (const Node* leaf : d.successes()) {
            ground_answer(extract(*leaf), cfg.solver, [&](const GroundAnswer& g) {
                bool well_formed = false;
                auto col = queens_columns(g.delta, n, well_formed);
                found = well_formed && ref::queens_ok(col);
                return false;
            });
        }
        o.require(found, "N=" + std::to_string(n) + ": no verified first solution");
        if (n == 12) o.require(since(start) < 60.0, "N=12 slower than 60 s");
        char buf[48];
        std::snprintf(buf, sizeof buf, "N=%d %.2fs ", n, since(start));
        o.detail << buf;
    }
    for (int n : {4, 6}) {
        Loaded l = load(nqueens_program(n), nqueens_query(n));
        EngineConfig cfg;
        cfg.max_steps = 2'000'000;
        Engine e(l.theory, cfg);
        DerivationResult d = e.derive(l.query);
        auto all = labeled_deltas(d, cfg.solver, 1000);
        int expected = ref::count_queens(n);
        bool valid = true;
        for (const auto& s : all) {
            std::string text;
            for (const auto& a : s) text += (text.empty() ? "" : ", ") + a;
            bool well_formed = false;
            auto col = queens_columns(parse_atom_list(text), n, well_formed);
            valid &= well_formed && ref::queens_ok(col);
        }
        o.require(valid, "N=" + std::to_string(n) + ": invalid labeled solution");
        o.require(static_cast<int>(all.size()) == expected, "N=" + std::to_string(n) + ": " +
                                                                std::to_string(all.size()) + " solutions, brute force " +
                                                                std::to_string(expected));
    }
}

void criterion_coloring(Outcome& o) {
    auto start = Clock::now();
    struct Instance {
        std::string name;
        Graph g;
        int colors;
    };
    for (const auto& inst : {Instance{"triangle", triangle(), 3}, Instance{"path4", path(4), 2}}) {
        Loaded l = load(coloring_program(inst.g, inst.colors), "[]");
        Engine e(l.theory, {});
        DerivationResult d = e.derive(l.query);
        auto all = labeled_deltas(d, {}, 1000);
        int expected = ref::count_colorings(inst.g.vertices, inst.g.edges, inst.colors);
        o.require(static_cast<int>(all.size()) == expected,
                  inst.name + ": " + std::to_string(all.size()) + " colorings, brute force " + std::to_string(expected));
        for (const auto& s : all) {
            std::map<std::string, std::string> color;
            for (const auto& a : parse_atom_list([&] {
                     std::string t;
                     for (const auto& x : s) t += (t.empty() ? "" : ", ") + x;
                     return t;
                 }()))
                color[a.args[0]->name] = a.args[1]->name;
            bool proper = static_cast<int>(color.size()) == inst.g.vertices;
            for (auto [u, v] : inst.g.edges)
                proper &= color["v" + std::to_string(u)] != color["v" + std::to_string(v)];
            o.require(proper, inst.name + ": improper coloring");
        }
    }
    o.require(since(start) < 5.0, "slower than 5 s");
}

EngineConfig random_config() {
    EngineConfig cfg;
    cfg.solver.lo = 0;
    cfg.solver.hi = 2;
    cfg.max_steps = 5000;
    cfg.max_nodes = 2000;
    cfg.max_node_size = 300;
    return cfg;
}

struct RandomRun {
    int frameworks = 0, answers = 0, groundings = 0, invalid = 0, inapplicable = 0, budget = 0;
    int subset = 0, mismatches = 0;
    std::vector<std::string> invalid_seeds, mismatch_seeds;
};

const RandomRun& random_run() {
    static RandomRun run = [] {
        RandomRun r;
        for (int seed = 0; seed < 500; ++seed) {
            RandomFramework f = random_framework(seed);
            Loaded l = load(f.program, f.query);
            EngineConfig cfg = random_config();
            Engine e(l.theory, cfg);
            DerivationResult d = e.derive(l.query);
            ++r.frameworks;
            if (d.budget_exhausted) {
                ++r.budget;
                continue;
            }
            std::set<VarId> qv;
            for (const auto& lit : l.query.conjuncts) collect_vars(lit.atom, qv);
            for (const Node* n : d.successes()) {
                ++r.answers;
                int k = 0;
                ground_answer(extract(*n), cfg.solver, [&](const GroundAnswer& g) {
                    Substitution sigma;
                    for (VarId v : qv)
                        if (g.witness.count(v)) sigma[v] = g.witness.at(v);
                    OracleVerdict v = check_abductive_answer(l.program, l.query, g.delta, sigma);
                    ++r.groundings;
                    if (v.kind == OracleVerdict::Invalid) {
                        ++r.invalid;
                        r.invalid_seeds.push_back(std::to_string(seed));
                    }
                    if (v.kind == OracleVerdict::Inapplicable) ++r.inapplicable;
                    return ++k < 8;
                });
            }
            if (d.undefined != 0) continue;
            Enumeration en;
            try {
                en = enumerate_answers(l.program, l.query, OracleOptions{}, 1);
            } catch (const BoundExceeded&) {
                continue;
            }
            if (!en.two_valued) continue;
            ++r.subset;
            if (d.successes().empty() != en.answers.empty()) {
                ++r.mismatches;
                r.mismatch_seeds.push_back(std::to_string(seed));
            }
        }
        return r;
    }();
    return run;
}

void criterion_soundness(Outcome& o) {
    const RandomRun& r = random_run();
    o.detail << r.frameworks << " frameworks, " << r.answers << " answers, " << r.groundings << " groundings checked, "
             << r.inapplicable << " inapplicable, " << r.budget << " budget-exhausted";
    o.require(r.invalid == 0, std::to_string(r.invalid) + " invalid groundings (seeds " + join(r.invalid_seeds) + ")");
    o.require(r.groundings > 0, "no groundings checked");
}

void criterion_completeness(Outcome& o) {
    const RandomRun& r = random_run();
    o.detail << "subset " << r.subset << " of " << r.frameworks;
    o.require(r.mismatches == 0, std::to_string(r.mismatches) + " mismatches (seeds " + join(r.mismatch_seeds) + ")");
    o.require(r.subset > 0, "empty subset");
}

void criterion_equivalence(Outcome& o) {
    std::size_t checks = 0, mismatches = 0, instances = 0, skipped = 0;
    std::string first_bad;
    RandomOptions ro;
    ro.ground = true;
    ro.constraints = false;
    for (int seed = 0; seed < 200; ++seed) {
        RandomFramework f = random_framework(1000 + seed, ro);
        Loaded l = load(f.program, f.query);
        GroundFramework gf(l.program, l.query, OracleOptions{});
        std::vector<Atom> base = gf.abducible_base();
        if (base.size() > 12) {
            ++skipped;
            continue;
        }
        std::vector<std::pair<Delta, Interpretation>> models;
        for (std::uint64_t mask = 0; mask < (1ULL << base.size()); ++mask) {
            Delta delta;
            for (std::size_t i = 0; i < base.size(); ++i)
                if (mask >> i & 1) delta.insert(atom_key(base[i]));
            Interpretation I = gf.fixpoint(delta);
            if (I.two_valued()) models.emplace_back(delta, std::move(I));
        }
        ++instances;
        EngineConfig cfg = random_config();
        cfg.observer = [&](const StepEvent& ev) {
            if (!ev.before || ev.rule == 18) return;
            for (const auto& [delta, I] : models) {
                ++checks;
                Truth before = gf.node_truth(*ev.before, I, delta);
                Truth after = gf.formula_truth(*ev.successors, I, delta);
                if (before != after) {
                    ++mismatches;
                    if (first_bad.empty())
                        first_bad = "seed " + std::to_string(1000 + seed) + " " + rule_name(ev.rule) + " " +
                                    truth_name(before) + " -> " + truth_name(after);
                }
            }
        };
        Engine e(l.theory, cfg);
        e.derive(l.query);
    }
    o.detail << instances << " instances, " << checks << " step/model checks";
    if (skipped) o.detail << ", " << skipped << " skipped for base size";
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches, first " + first_bad);
    o.require(instances >= 200 - skipped && checks > 0, "no checks");
}

void criterion_no_r18(Outcome& o) {
    RandomOptions ro;
    ro.statically_allowed = true;
    int selected = 0, budget = 0;
    std::string seeds;
    for (int seed = 0; seed < 100; ++seed) {
        RandomFramework f = random_framework(5000 + seed, ro);
        Loaded l = load(f.program, f.query);
        Engine e(l.theory, random_config());
        DerivationResult d = e.derive(l.query);
        budget += d.budget_exhausted;
        for (int r : d.rules)
            if (r == 18) {
                ++selected;
                seeds += std::to_string(5000 + seed) + " ";
                break;
            }
    }
    o.detail << "100 frameworks, " << budget << " budget-exhausted";
    o.require(selected == 0, "R18 selected in " + std::to_string(selected) + " frameworks: " + seeds);
}

TermPtr random_expr(std::mt19937_64& rng, int depth) {
    int pick = std::uniform_int_distribution<int>(0, depth > 0 ? 6 : 1)(rng);
    auto var = [&] {
        VarId v = std::uniform_int_distribution<VarId>(1, 3)(rng);
        return make_var("X" + std::to_string(v), v);
    };
    switch (pick) {
        case 0: return var();
        case 1: return make_int(std::uniform_int_distribution<int>(-3, 3)(rng));
        case 2: return make_arith(ArithOp::Add, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 3: return make_arith(ArithOp::Sub, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
        case 4: return make_arith(ArithOp::Mul, {make_int(std::uniform_int_distribution<int>(-2, 2)(rng)), var()});
        case 5: return make_arith(ArithOp::Abs, {random_expr(rng, depth - 1)});
        default: return var();
    }
}

CAtom random_catom(std::mt19937_64& rng) {
    CAtom c;
    c.op = static_cast<CmpOp>(std::uniform_int_distribution<int>(0, 5)(rng));
    c.lhs = random_expr(rng, 2);
    c.rhs = random_expr(rng, 2);
    return c;
}

bool same_catom(const CAtom& a, const CAtom& b) {
    return a.op == b.op && ref::same(a.lhs, b.lhs) && ref::same(a.rhs, b.rhs);
}

void criterion_solver(Outcome& o) {
    std::mt19937_64 rng(11);
    const std::int64_t lo = -3, hi = 3;
    SolverConfig cfg;
    cfg.lo = lo;
    cfg.hi = hi;
    int disagree = 0, sat = 0, bad_witness = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<CAtom> store;
        int n = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int k = 0; k < n; ++k) store.push_back(random_catom(rng));
        bool expected = ref::brute_force_sat(store, lo, hi);
        SatResult r = check_sat(store, cfg);
        if ((r.kind == SatResult::Sat) != expected || r.kind == SatResult::BudgetExceeded) ++disagree;
        if (r.kind == SatResult::Sat) {
            ++sat;
            for (const auto& c : store) bad_witness += !ref::satisfied(c, r.witness);
        }
    }
    int involution = 0, middle = 0;
    for (int i = 0; i < 10000; ++i) {
        CAtom c = random_catom(rng);
        Witness w;
        for (VarId v = 1; v <= 3; ++v) w[v] = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
        involution += !same_catom(complement(complement(c)), c);
        middle += holds(c, w) == holds(complement(c), w);
    }
    o.detail << "1000 stores (" << sat << " sat), 10000 pairs";
    o.require(disagree == 0, std::to_string(disagree) + " disagreements with brute force");
    o.require(bad_witness == 0, std::to_string(bad_witness) + " witness violations");
    o.require(involution == 0, std::to_string(involution) + " involution failures");
    o.require(middle == 0, std::to_string(middle) + " excluded-middle failures");
}

void criterion_unification(Outcome& o) {
    ref::TermGen gen(7);
    int agree = 0, unifiable = 0;
    std::string first_bad;
    for (int i = 0; i < 1000; ++i) {
        TermPtr a = gen.term(3), b = gen.term(3);
        std::vector<Equation> eqs{{a, b}};
        ref::Robinson robinson;
        auto expected = robinson.unify(eqs);
        auto actual = normalize_equalities(eqs, no_universals());
        bool ok = expected.has_value() == actual.has_value();
        if (ok && actual) {
            ++unifiable;
            std::map<VarId, TermPtr> mine;
            for (const auto& [l, r] : *actual) {
                ok &= l->is_var() && !mine.count(l->var_id());
                if (l->is_var()) mine[l->var_id()] = r;
            }
            ok &= ref::same(ref::substitute_ref(a, mine), ref::substitute_ref(b, mine));
            std::set<VarId> vars;
            collect_vars(a, vars);
            collect_vars(b, vars);
            ok &= ref::more_general(mine, *expected, vars) && ref::more_general(*expected, mine, vars);
        }
        agree += ok;
        if (!ok && first_bad.empty()) first_bad = to_string(a) + " = " + to_string(b);
    }
    o.detail << "1000 pairs, " << unifiable << " unifiable";
    o.require(agree == 1000, std::to_string(1000 - agree) + " disagreements, first " + first_bad);
}

}  // namespace

int main() {
    report(1, "golden derivation example1", criterion_example1);
    report(2, "case analysis a(2)", criterion_case_analysis);
    report(3, "undefined outcome", criterion_undefined);
    report(4, "web repair", criterion_webrepair);
    report(5, "n-queens", criterion_nqueens);
    report(6, "graph coloring", criterion_coloring);
    report(7, "soundness on random frameworks", criterion_soundness);
    report(8, "failure soundness and weak completeness", criterion_completeness);
    report(9, "equivalence preservation", criterion_equivalence);
    report(10, "no R18 under static allowedness", criterion_no_r18);
    report(11, "constraint solver", criterion_solver);
    report(12, "unification", criterion_unification);
    return failures == 0 ? 0 : 1;
}
