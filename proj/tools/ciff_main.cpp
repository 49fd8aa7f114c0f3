// ciff: command-line front end.
//
//   ciff run FILE... --query Q        stream abductive answers
//   ciff trace FILE... --query Q      print every formula of the derivation
//   ciff check-allowed FILE... --query Q
//   ciff oracle check FILE... --query Q --delta D [--bind B]
//   ciff bench nqueens N | coloring GRAPH --colors K | webrepair
//
// Exit codes: 0 success, 1 failure, 2 budget exhausted, 3 parse or
// validation error, 4 undefined.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ciff/allowedness.hpp"
#include "ciff/answers.hpp"
#include "ciff/benchmarks.hpp"
#include "ciff/completion.hpp"
#include "ciff/engine.hpp"
#include "ciff/oracle.hpp"
#include "ciff/syntax.hpp"

namespace {

using namespace ciff;
using json = nlohmann::ordered_json;

enum Exit { kSuccess = 0, kFailure = 1, kBudget = 2, kInvalid = 3, kUndefined = 4 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::vector<std::string> files;
    std::string query;
    std::size_t max_answers = std::numeric_limits<std::size_t>::max();
    std::uint64_t max_steps = 200'000;
    std::uint64_t solver_budget = 2'000'000;
    std::vector<std::int64_t> fd_bounds;
    bool label = false;
    std::size_t max_labels = 1;
    bool fair = false;
    unsigned parallel = 1;
    bool preground = false;
    bool require_allowed = false;
    bool trace = false;
    bool show_equalities = false;
    std::string format = "json";
};

struct Framework {
    Program program;
    Query query;
    CiffTheory theory;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Framework load(const std::vector<std::string>& sources, const std::string& query, bool pre) {
    Framework f;
    f.program = parse_program(sources);
    if (pre) f.program = preground(f.program);
    f.query = parse_query(query, f.program.abducibles);
    check_query_against_program(f.program, f.query);
    f.theory = complete(f.program, user_predicates(f.query));
    return f;
}

// Names the file a parse error comes from when it fails on its own.
[[noreturn]] void rethrow_with_file(const ParseError& e, const std::vector<std::string>& files,
                                    const std::vector<std::string>& sources) {
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            parse_program(sources[i]);
        } catch (const ParseError& own) {
            throw UsageError(files[i] + ":" + own.what());
        }
    }
    throw e;
}

std::vector<std::string> read_sources(const std::vector<std::string>& files) {
    std::vector<std::string> sources;
    for (const auto& file : files) sources.push_back(read_file(file));
    return sources;
}

Framework load_files(const RunOptions& o) {
    std::vector<std::string> sources = read_sources(o.files);
    try {
        parse_program(sources);
    } catch (const ParseError& e) {
        rethrow_with_file(e, o.files, sources);
    }
    return load(sources, o.query, o.preground);
}

EngineConfig engine_config(const RunOptions& o) {
    EngineConfig cfg;
    cfg.max_answers = o.max_answers;
    cfg.max_steps = o.max_steps;
    cfg.fair = o.fair;
    cfg.parallel = o.parallel;
    cfg.trace = o.trace;
    cfg.solver.node_budget = o.solver_budget;
    if (!o.fd_bounds.empty()) {
        if (o.fd_bounds.size() != 2 || o.fd_bounds[0] > o.fd_bounds[1])
            throw UsageError("--fd-bounds expects LO,HI with LO <= HI");
        cfg.solver.lo = o.fd_bounds[0];
        cfg.solver.hi = o.fd_bounds[1];
    }
    return cfg;
}

bool check_allowed(const Framework& f, bool required) {
    AllowednessReport r = check_ciff_allowed(f.theory, f.query);
    if (r.violations.empty()) return true;
    for (const auto& v : r.violations)
        std::cerr << (required ? "error: " : "warning: ") << v.location << ": variable " << v.variable << " "
                  << v.reason << "\n";
    return !required;
}

void print_answer(const ExtractedAnswer& a, const RunOptions& o, const GroundAnswer* g) {
    if (o.format == "text") {
        std::cout << format_answer(a, o.show_equalities);
        if (g) {
            std::cout << "  ground [";
            for (std::size_t i = 0; i < g->delta.size(); ++i) std::cout << (i ? ", " : "") << to_string(g->delta[i]);
            std::cout << "]";
        }
        std::cout << "\n";
    } else {
        std::cout << answer_json(a, o.show_equalities, g) << "\n";
    }
}

void print_status(const std::string& status, const RunOptions& o) {
    if (o.format == "text")
        std::cout << status << "\n";
    else
        std::cout << status_json(status) << "\n";
}

void print_trace(const DerivationResult& d) {
    for (std::size_t i = 0; i < d.trace.size(); ++i)
        std::cout << "F" << i << " = " << d.trace[i].formula << " [" << rule_name(d.trace[i].rule) << "]\n";
}

int finish(const DerivationResult& d, const RunOptions& o, const SolverConfig& solver) {
    std::size_t printed = 0;
    bool solver_budget = false;
    for (const Node* leaf : d.successes()) {
        ExtractedAnswer a = extract(*leaf);
        std::string bad = check_extraction(*leaf, a);
        if (!bad.empty()) throw std::logic_error("answer extraction: " + bad);
        if (!o.label) {
            print_answer(a, o, nullptr);
            ++printed;
            continue;
        }
        std::size_t labels = 0;
        bool done = ground_answer(a, solver, [&](const GroundAnswer& g) {
            print_answer(a, o, &g);
            return ++labels < o.max_labels;
        });
        solver_budget |= !done;
        printed += labels;
    }
    switch (d.status) {
        case DerivationResult::Success:
            return printed > 0 || !solver_budget ? kSuccess : kBudget;
        case DerivationResult::Undefined:
            print_status("undefined", o);
            return kUndefined;
        case DerivationResult::BudgetExhausted:
            print_status("budget_exhausted", o);
            return kBudget;
        case DerivationResult::Failure:
            break;
    }
    print_status("failure", o);
    return kFailure;
}

int cmd_run(RunOptions o) {
    Framework f = load_files(o);
    if (!check_allowed(f, o.require_allowed)) return kInvalid;
    EngineConfig cfg = engine_config(o);
    Engine engine(f.theory, cfg);
    DerivationResult d = engine.derive(f.query);
    if (o.trace) print_trace(d);
    return finish(d, o, cfg.solver);
}

int cmd_check_allowed(const RunOptions& o) {
    Framework f = load_files(o);
    AllowednessReport r = classify(f.theory, f.query);
    if (o.format == "text") {
        std::cout << verdict_name(r.verdict) << "\n";
        for (const auto& v : r.violations) {
            std::cout << "  " << v.location << ": variable " << v.variable << " " << v.reason;
            if (!v.suggestion.empty()) std::cout << " (" << v.suggestion << ")";
            std::cout << "\n";
        }
    } else {
        json j;
        j["verdict"] = verdict_name(r.verdict);
        j["violations"] = json::array();
        for (const auto& v : r.violations)
            j["violations"].push_back(
                {{"location", v.location}, {"variable", v.variable}, {"reason", v.reason}, {"suggestion", v.suggestion}});
        std::cout << j.dump() << "\n";
    }
    return r.verdict == Verdict::NotAllowed ? kFailure : kSuccess;
}

// The bindings are parsed together with the query so that they share its variables.
int cmd_oracle_check(const RunOptions& o, const std::string& delta_text, const std::string& bind_text,
                     const std::vector<std::int64_t>& range) {
    std::vector<std::string> sources = read_sources(o.files);
    Program p;
    try {
        p = parse_program(sources);
    } catch (const ParseError& e) {
        rethrow_with_file(e, o.files, sources);
    }
    Query q = parse_query(o.query, p.abducibles);
    std::string combined = o.query;
    while (!combined.empty() && std::isspace(static_cast<unsigned char>(combined.back()))) combined.pop_back();
    if (!combined.empty() && combined.front() == '[' && combined.back() == ']')
        combined = combined.substr(1, combined.size() - 2);
    if (!bind_text.empty()) combined += (q.conjuncts.empty() ? "" : ", ") + bind_text;
    Query qb = parse_query(combined, p.abducibles);
    Substitution sigma;
    for (std::size_t i = q.conjuncts.size(); i < qb.conjuncts.size(); ++i) {
        const Literal& l = qb.conjuncts[i];
        if (!l.positive || l.atom.kind != AtomKind::Equality || !l.atom.args[0]->is_var())
            throw UsageError("--bind expects equalities X = t");
        sigma[l.atom.args[0]->var_id()] = l.atom.args[1];
    }
    q = Query{std::vector<Literal>(qb.conjuncts.begin(), qb.conjuncts.begin() + q.conjuncts.size())};
    std::vector<Atom> delta = delta_text.empty() ? std::vector<Atom>{} : parse_atom_list(delta_text, p.abducibles);
    OracleOptions opts;
    if (!range.empty()) {
        if (range.size() != 2 || range[0] > range[1]) throw UsageError("--range expects LO,HI with LO <= HI");
        opts.lo = range[0];
        opts.hi = range[1];
    }
    OracleVerdict v = check_abductive_answer(p, q, delta, sigma, opts);
    if (o.format == "text") {
        std::cout << verdict_name(v.kind);
        if (!v.reason.empty()) std::cout << ": " << v.reason;
        std::cout << "\n";
    } else {
        std::cout << json{{"verdict", verdict_name(v.kind)}, {"reason", v.reason}}.dump() << "\n";
    }
    return v.kind == OracleVerdict::Valid ? kSuccess : kFailure;
}

Graph load_graph(const std::string& spec) {
    if (std::filesystem::exists(spec)) return parse_dimacs(read_file(spec));
    if (spec == "triangle") return triangle();
    if (spec.rfind("path", 0) == 0 && spec.size() > 4) return path(std::stoi(spec.substr(4)));
    throw UsageError("unknown graph " + spec + " (a DIMACS file, 'triangle' or 'path<N>')");
}

int cmd_bench(RunOptions o, const std::string& name, const std::string& arg, int colors) {
    std::string program, query;
    if (name == "nqueens") {
        int n = 0;
        try {
            n = std::stoi(arg);
        } catch (const std::exception&) {
            throw UsageError("nqueens expects a board size");
        }
        if (n < 1) throw UsageError("nqueens expects a positive board size");
        program = nqueens_program(n);
        query = nqueens_query(n);
    } else if (name == "nqueens-denial") {
        int n = std::stoi(arg);
        if (n < 1) throw UsageError("nqueens-denial expects a positive board size");
        program = nqueens_denial_program(n);
    } else if (name == "coloring") {
        program = coloring_program(load_graph(arg), colors);
    } else if (name == "webrepair") {
        program = webrepair_program();
    } else {
        throw UsageError("unknown benchmark " + name);
    }
    if (o.max_answers == std::numeric_limits<std::size_t>::max() && name == "nqueens") o.max_answers = 1;

    auto start = std::chrono::steady_clock::now();
    Framework f = load({program}, query, o.preground);
    EngineConfig cfg = engine_config(o);
    Engine engine(f.theory, cfg);
    DerivationResult d = engine.derive(f.query);
    std::size_t labeled = 0;
    json first = nullptr;
    for (const Node* leaf : d.successes()) {
        ExtractedAnswer a = extract(*leaf);
        if (!o.label) {
            if (first.is_null()) first = json::parse(answer_json(a))["abducibles"];
            continue;
        }
        ground_answer(a, cfg.solver, [&](const GroundAnswer& g) {
            if (first.is_null()) first = json::parse(answer_json(a, false, &g))["ground_abducibles"];
            return ++labeled < o.max_labels;
        });
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json j;
    j["benchmark"] = name;
    j["status"] = status_name(d.status);
    j["answers"] = d.successes().size();
    if (o.label) j["labeled"] = labeled;
    j["steps"] = d.steps;
    j["seconds"] = seconds;
    j["first"] = first;
    std::cout << j.dump() << "\n";
    return d.status == DerivationResult::Success ? kSuccess
           : d.status == DerivationResult::BudgetExhausted ? kBudget
           : d.status == DerivationResult::Undefined ? kUndefined
                                                      : kFailure;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool files = true) {
    if (files) cmd->add_option("files", o.files, "Program files")->required()->check(CLI::ExistingFile);
    cmd->add_option("-q,--query", o.query, "Query, e.g. \"r(Y)\" or \"[]\"");
    cmd->add_option("--max-answers", o.max_answers, "Stop after this many answers")->check(CLI::PositiveNumber);
    cmd->add_option("--max-steps", o.max_steps, "Derivation step budget")->check(CLI::PositiveNumber);
    cmd->add_option("--solver-budget", o.solver_budget, "Search nodes per satisfiability check")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fd-bounds", o.fd_bounds, "Finite domain bounds LO,HI")->delimiter(',')->expected(2);
    cmd->add_flag("--label", o.label, "Label constraint variables and print ground answers");
    cmd->add_option("--max-labels", o.max_labels, "Labelings printed per answer")->check(CLI::PositiveNumber);
    cmd->add_flag("--fair", o.fair, "Breadth-first node selection");
    cmd->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--preground", o.preground, "Ground integrity constraints over fact tables first");
    cmd->add_flag("--require-allowed", o.require_allowed, "Reject frameworks that are not CIFF allowed");
    cmd->add_flag("--trace", o.trace, "Print the derivation");
    cmd->add_flag("--show-equalities", o.show_equalities, "Include the equalities E in answers");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CIFF abductive proof procedure"};
    app.require_subcommand(1);

    RunOptions run_opts, trace_opts, allowed_opts, oracle_opts, bench_opts;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Compute abductive answers");
    add_run_options(run, run_opts);
    run->add_option("--seed", seed, "Random seed (unused by sequential derivations)");

    auto* trace = app.add_subcommand("trace", "Print the derivation formula by formula");
    add_run_options(trace, trace_opts);

    auto* allowed = app.add_subcommand("check-allowed", "Classify a framework by allowedness");
    allowed->add_option("files", allowed_opts.files, "Program files")->required()->check(CLI::ExistingFile);
    allowed->add_option("-q,--query", allowed_opts.query, "Query");
    allowed->add_option("--format", allowed_opts.format)->check(CLI::IsMember({"json", "text"}));

    auto* oracle = app.add_subcommand("oracle", "Ground semantic checks");
    oracle->require_subcommand(1);
    auto* check = oracle->add_subcommand("check", "Check a ground answer against the three-valued semantics");
    std::string delta_text, bind_text;
    std::vector<std::int64_t> range;
    check->add_option("files", oracle_opts.files, "Program files")->required()->check(CLI::ExistingFile);
    check->add_option("-q,--query", oracle_opts.query, "Query");
    check->add_option("--delta", delta_text, "Ground abducibles, e.g. \"[a(1), b(2)]\"");
    check->add_option("--bind", bind_text, "Query variable bindings, e.g. \"Y = 1\"");
    check->add_option("--range", range, "Integer universe LO,HI")->delimiter(',')->expected(2);
    check->add_option("--format", oracle_opts.format)->check(CLI::IsMember({"json", "text"}));

    auto* bench = app.add_subcommand("bench", "Run a generated benchmark");
    std::string bench_name, bench_arg;
    int colors = 3;
    bench->add_option("name", bench_name, "nqueens, nqueens-denial, coloring or webrepair")->required();
    bench->add_option("arg", bench_arg, "Board size or graph (DIMACS file, triangle, path<N>)");
    bench->add_option("--colors", colors, "Colors for coloring")->check(CLI::PositiveNumber);
    add_run_options(bench, bench_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_opts);
        if (*trace) {
            trace_opts.trace = true;
            return cmd_run(trace_opts);
        }
        if (*allowed) return cmd_check_allowed(allowed_opts);
        if (*check) return cmd_oracle_check(oracle_opts, delta_text, bind_text, range);
        if (*bench) return cmd_bench(bench_opts, bench_name, bench_arg, colors);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kInvalid;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const BoundExceeded& e) {
        std::cerr << "oracle bound exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kSuccess;
}
