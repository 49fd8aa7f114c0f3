#include "ciff/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ciff/allowedness.hpp"

namespace ciff {

namespace {

struct Item {
    std::string name;
    std::vector<TermPtr> args;
    bool symmetric = false;
};

Item relation(std::string name, TermPtr l, TermPtr r, bool symmetric) {
    return Item{std::move(name), {std::move(l), std::move(r)}, symmetric};
}

// Orders comparisons as < or =< so that X #> Y and Y #< X compare equal.
Item constraint_item(CmpOp op, TermPtr l, TermPtr r) {
    switch (op) {
        case CmpOp::Gt: return relation(cmp_symbol(CmpOp::Lt), r, l, false);
        case CmpOp::Ge: return relation(cmp_symbol(CmpOp::Le), r, l, false);
        case CmpOp::Eq:
        case CmpOp::Ne: return relation(cmp_symbol(op), l, r, true);
        default: return relation(cmp_symbol(op), l, r, false);
    }
}

using Groups = std::vector<std::vector<Item>>;  // abducibles, constraints, equalities, disequalities

Groups actual_items(const ExtractedAnswer& a) {
    Groups g(4);
    for (const auto& d : a.delta) g[0].push_back(Item{d.pred, d.args, false});
    for (const auto& c : a.gamma) g[1].push_back(constraint_item(c.op, c.lhs, c.rhs));
    for (const auto& [l, r] : a.equalities) g[2].push_back(relation("=", l, r, true));
    for (const auto& d : a.disequalities) g[3].push_back(relation("\\==", d.var, d.term, true));
    return g;
}

Groups expected_items(const ExpectedAnswer& e) {
    const std::vector<std::string>* lists[4] = {&e.abducibles, &e.constraints, &e.equalities, &e.disequalities};
    std::string text;
    for (const auto* l : lists)
        for (const auto& s : *l) text += (text.empty() ? "" : ", ") + s;
    Query q = parse_query(text);
    Groups g(4);
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < lists[i]->size(); ++j, ++k) {
            const Literal& l = q.conjuncts.at(k);
            const Atom& a = l.atom;
            if (a.kind == AtomKind::Equality && !l.positive) {
                g[i].push_back(relation("\\==", a.args[0], a.args[1], true));
            } else if (a.kind == AtomKind::Equality) {
                g[i].push_back(i == 1 ? constraint_item(CmpOp::Eq, a.args[0], a.args[1])
                                      : relation("=", a.args[0], a.args[1], true));
            } else if (a.kind == AtomKind::Constraint) {
                g[i].push_back(constraint_item(a.op, a.args[0], a.args[1]));
            } else {
                g[i].push_back(Item{a.pred, a.args, false});
            }
        }
    }
    return g;
}

struct Renaming {
    std::map<VarId, VarId> fwd, back;
};

bool match_term(const TermPtr& e, const TermPtr& a, Renaming& r) {
    if (e->kind != a->kind) return false;
    if (e->is_var()) {
        auto f = r.fwd.find(e->var_id());
        auto b = r.back.find(a->var_id());
        if (f != r.fwd.end() || b != r.back.end())
            return f != r.fwd.end() && b != r.back.end() && f->second == a->var_id() && b->second == e->var_id();
        r.fwd[e->var_id()] = a->var_id();
        r.back[a->var_id()] = e->var_id();
        return true;
    }
    if (e->kind == TermKind::Int) return e->value == a->value;
    if (e->name != a->name || e->op != a->op || e->args.size() != a->args.size()) return false;
    for (std::size_t i = 0; i < e->args.size(); ++i)
        if (!match_term(e->args[i], a->args[i], r)) return false;
    return true;
}

bool match_item(const Item& e, const Item& a, Renaming& r) {
    if (e.name != a.name || e.args.size() != a.args.size()) return false;
    Renaming t = r;
    bool ok = true;
    for (std::size_t i = 0; i < e.args.size() && ok; ++i) ok = match_term(e.args[i], a.args[i], t);
    if (ok) {
        r = std::move(t);
        return true;
    }
    if (!e.symmetric) return false;
    t = r;
    if (match_term(e.args[0], a.args[1], t) && match_term(e.args[1], a.args[0], t)) {
        r = std::move(t);
        return true;
    }
    return false;
}

// Backtracking search for a bijection between the items of every group.
bool match_groups(const Groups& e, const Groups& a, std::size_t g, std::size_t i, std::vector<std::vector<bool>>& used,
                  Renaming& r) {
    if (g == e.size()) return true;
    if (i == e[g].size()) return match_groups(e, a, g + 1, 0, used, r);
    for (std::size_t j = 0; j < a[g].size(); ++j) {
        if (used[g][j]) continue;
        Renaming t = r;
        if (!match_item(e[g][i], a[g][j], t)) continue;
        used[g][j] = true;
        if (match_groups(e, a, g, i + 1, used, t)) {
            r = std::move(t);
            return true;
        }
        used[g][j] = false;
    }
    return false;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExpectedAnswer expected_from(const nlohmann::json& j) {
    ExpectedAnswer e;
    auto get = [&](const char* k) {
        return j.contains(k) && j[k].is_array() ? j[k].get<std::vector<std::string>>() : std::vector<std::string>{};
    };
    e.check_constraints = !(j.contains("constraints") && j["constraints"] == "any");
    e.abducibles = get("abducibles");
    e.constraints = get("constraints");
    e.equalities = get("equalities");
    e.disequalities = get("disequalities");
    return e;
}

std::string join_rules(const std::vector<int>& rules) {
    std::string out;
    for (int r : rules) out += (out.empty() ? "" : " ") + rule_name(r);
    return out;
}

}  // namespace

bool alpha_equivalent(const ExtractedAnswer& actual, const ExpectedAnswer& expected, bool compare_equalities) {
    Groups a = actual_items(actual);
    Groups e = expected_items(expected);
    if (!compare_equalities && expected.equalities.empty()) {
        a[2].clear();
        e[2].clear();
    }
    if (!expected.check_constraints) a[1].clear();
    for (std::size_t g = 0; g < a.size(); ++g)
        if (a[g].size() != e[g].size()) return false;
    std::vector<std::vector<bool>> used;
    for (const auto& grp : a) used.emplace_back(grp.size(), false);
    Renaming r;
    return match_groups(e, a, 0, 0, used, r);
}

CorpusCase load_case(const std::filesystem::path& dir) {
    CorpusCase c;
    c.name = dir.filename().string();
    c.dir = dir;
    std::vector<std::filesystem::path> programs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".alp") programs.push_back(entry.path());
    std::sort(programs.begin(), programs.end());
    for (const auto& p : programs) c.program += read_file(p) + "\n";
    if (std::filesystem::exists(dir / "query.txt")) c.query = read_file(dir / "query.txt");
    while (!c.query.empty() && (c.query.back() == '\n' || c.query.back() == ' ')) c.query.pop_back();
    c.expected_json = read_file(dir / "expected.json");
    return c;
}

std::vector<std::filesystem::path> list_cases(const std::filesystem::path& root) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(root))
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "expected.json")) out.push_back(entry.path());
    std::sort(out.begin(), out.end());
    return out;
}

GoldenResult run_golden(const CorpusCase& c) {
    GoldenResult res;
    nlohmann::json exp = nlohmann::json::parse(c.expected_json);
    std::string kind = exp.at("kind");
    Program p = parse_program(c.program);
    Query q = parse_query(c.query, p.abducibles);
    check_query_against_program(p, q);
    CiffTheory th = complete(p, user_predicates(q));

    if (kind == "allowedness") {
        AllowednessReport r = classify(th, q);
        std::string got = verdict_name(r.verdict);
        res.pass = got == exp.at("verdict").get<std::string>();
        res.detail = "verdict " + got;
        return res;
    }

    EngineConfig cfg;
    if (exp.contains("options")) {
        const auto& o = exp["options"];
        cfg.max_answers = o.value("max_answers", cfg.max_answers);
        cfg.max_steps = o.value("max_steps", cfg.max_steps);
        cfg.fair = o.value("fair", false);
    }
    Engine engine(th, cfg);
    res.derivation = engine.derive(q);
    const DerivationResult& d = res.derivation;

    if (exp.contains("trace")) {
        std::vector<std::string> want = exp["trace"];
        std::vector<std::string> got;
        for (int r : d.rules) got.push_back(rule_name(r));
        if (got != want) {
            res.detail = "trace " + join_rules(d.rules);
            return res;
        }
    }

    if (kind == "undefined" || kind == "failure" || kind == "budget") {
        static const std::map<std::string, DerivationResult::Status> status{
            {"undefined", DerivationResult::Undefined},
            {"failure", DerivationResult::Failure},
            {"budget", DerivationResult::BudgetExhausted}};
        res.pass = d.status == status.at(kind);
        res.detail = std::string("status ") + status_name(d.status);
        return res;
    }

    std::vector<ExtractedAnswer> got;
    for (const Node* n : d.successes()) got.push_back(extract(*n));
    std::vector<ExpectedAnswer> want;
    for (const auto& a : exp.value("answers", nlohmann::json::array())) want.push_back(expected_from(a));
    bool exact = exp.value("exact", false);
    std::size_t min_answers = exp.value("min_answers", want.size());
    if (exact && got.size() != want.size()) {
        res.detail = std::to_string(got.size()) + " answers, expected " + std::to_string(want.size());
        return res;
    }
    if (got.size() < min_answers) {
        res.detail = std::to_string(got.size()) + " answers, expected at least " + std::to_string(min_answers);
        return res;
    }
    std::vector<bool> used(got.size(), false);
    for (std::size_t i = 0; i < want.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < got.size() && !found; ++j) {
            if (used[j] || !alpha_equivalent(got[j], want[i])) continue;
            used[j] = found = true;
        }
        if (!found) {
            res.detail = "no answer matches expected answer " + std::to_string(i + 1);
            return res;
        }
    }
    res.pass = true;
    res.detail = std::to_string(got.size()) + " answers";
    return res;
}

}  // namespace ciff
