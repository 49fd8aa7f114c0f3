#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ciff/allowedness.hpp"
#include "ciff/answers.hpp"
#include "ciff/benchmarks.hpp"
#include "ciff/engine.hpp"
#include "ciff/oracle.hpp"

namespace py = pybind11;
using namespace ciff;

namespace {

struct Framework {
    Program program;
    Query query;
    CiffTheory theory;
};

Framework load(const std::string& program, const std::string& query) {
    Framework f;
    f.program = parse_program(program);
    f.query = parse_query(query, f.program.abducibles);
    check_query_against_program(f.program, f.query);
    f.theory = complete(f.program, user_predicates(f.query));
    return f;
}

py::dict solve(const std::string& program, const std::string& query, std::size_t max_answers,
               std::uint64_t max_steps, bool fair, bool label, bool show_equalities, std::int64_t lo,
               std::int64_t hi) {
    Framework f = load(program, query);
    EngineConfig cfg;
    cfg.max_answers = max_answers == 0 ? cfg.max_answers : max_answers;
    cfg.max_steps = max_steps;
    cfg.fair = fair;
    cfg.solver.lo = lo;
    cfg.solver.hi = hi;
    DerivationResult d;
    std::vector<std::string> answers;
    {
        py::gil_scoped_release release;
        Engine engine(f.theory, cfg);
        d = engine.derive(f.query);
        for (const Node* leaf : d.successes()) {
            ExtractedAnswer a = extract(*leaf);
            if (!label) {
                answers.push_back(answer_json(a, show_equalities));
                continue;
            }
            ground_answer(a, cfg.solver, [&](const GroundAnswer& g) {
                answers.push_back(answer_json(a, show_equalities, &g));
                return false;
            });
        }
    }
    py::dict out;
    out["status"] = status_name(d.status);
    out["answers"] = answers;
    out["steps"] = d.steps;
    out["failures"] = d.failures;
    return out;
}

py::dict check_allowed(const std::string& program, const std::string& query) {
    Framework f = load(program, query);
    AllowednessReport r = classify(f.theory, f.query);
    py::list violations;
    for (const auto& v : r.violations) {
        py::dict d;
        d["location"] = v.location;
        d["variable"] = v.variable;
        d["reason"] = v.reason;
        d["suggestion"] = v.suggestion;
        violations.append(d);
    }
    py::dict out;
    out["verdict"] = verdict_name(r.verdict);
    out["violations"] = violations;
    return out;
}

std::vector<std::pair<std::string, std::string>> trace(const std::string& program, const std::string& query,
                                                       std::uint64_t max_steps) {
    Framework f = load(program, query);
    EngineConfig cfg;
    cfg.trace = true;
    cfg.max_steps = max_steps;
    Engine engine(f.theory, cfg);
    DerivationResult d = engine.derive(f.query);
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& step : d.trace) out.emplace_back(rule_name(step.rule), step.formula);
    return out;
}

std::string check_answer(const std::string& program, const std::string& query, const std::string& delta,
                         std::int64_t lo, std::int64_t hi) {
    Program p = parse_program(program);
    Query q = parse_query(query, p.abducibles);
    OracleOptions opts;
    opts.lo = lo;
    opts.hi = hi;
    std::vector<Atom> atoms = delta.empty() ? std::vector<Atom>{} : parse_atom_list(delta, p.abducibles);
    return verdict_name(check_abductive_answer(p, q, atoms, {}, opts).kind);
}

}  // namespace

PYBIND11_MODULE(_ciff, m) {
    m.doc() = "Abductive logic programming with constraints";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("solve", &solve, py::arg("program"), py::arg("query") = "[]", py::arg("max_answers") = 0,
          py::arg("max_steps") = 200'000, py::arg("fair") = false, py::arg("label") = false,
          py::arg("show_equalities") = false, py::arg("lo") = -10'000'000, py::arg("hi") = 10'000'000,
          "Runs a derivation; answers are JSON strings.");
    m.def("check_allowed", &check_allowed, py::arg("program"), py::arg("query") = "[]");
    m.def("trace", &trace, py::arg("program"), py::arg("query") = "[]", py::arg("max_steps") = 10'000);
    m.def("check_answer", &check_answer, py::arg("program"), py::arg("query"), py::arg("delta"), py::arg("lo") = 0,
          py::arg("hi") = 2, "Validates a ground answer; query variables range over the universe.");

    m.def("nqueens_program", &nqueens_program, py::arg("n"));
    m.def("nqueens_query", &nqueens_query, py::arg("n"));
    m.def("webrepair_program", &webrepair_program);
    m.def(
        "coloring_program",
        [](int vertices, const std::vector<std::pair<int, int>>& edges, int colors) {
            return coloring_program(Graph{vertices, edges}, colors);
        },
        py::arg("vertices"), py::arg("edges"), py::arg("colors"));
}
