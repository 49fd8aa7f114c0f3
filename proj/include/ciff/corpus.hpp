#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ciff/answers.hpp"
#include "ciff/engine.hpp"

namespace ciff {

// An expected answer written in surface syntax. Variables are shared across
// the four lists and matched up to renaming.
struct ExpectedAnswer {
    std::vector<std::string> abducibles;
    std::vector<std::string> constraints;
    std::vector<std::string> equalities;
    std::vector<std::string> disequalities;  // "X \\== t"
    bool check_constraints = true;             // false: any Gamma is accepted
};

// True if a bijective variable renaming maps `expected` onto `actual`, with
// each list compared as a set. `=` and `\==` may be read either way round.
// Equalities are compared only when `expected.equalities` is non-empty or
// `compare_equalities` is set.
bool alpha_equivalent(const ExtractedAnswer& actual, const ExpectedAnswer& expected, bool compare_equalities = false);

struct CorpusCase {
    std::string name;
    std::filesystem::path dir;
    std::string program;  // concatenated program files
    std::string query;
    std::string expected_json;
};

CorpusCase load_case(const std::filesystem::path& dir);
std::vector<std::filesystem::path> list_cases(const std::filesystem::path& root);

struct GoldenResult {
    bool pass = false;
    std::string detail;
    DerivationResult derivation;
};

// Runs a case and compares it with its expected.json:
//   {"kind": "answers" | "undefined" | "failure" | "budget" | "allowedness",
//    "answers": [{"abducibles": [...], "constraints": [...], "equalities": [...], "disequalities": [...]}],
//    ("constraints": "any" accepts every Gamma)
//    "exact": true, "min_answers": 1, "trace": ["Init", "R3", ...], "verdict": "statically_allowed",
//    "options": {"max_answers": n, "max_steps": n, "fair": bool}}
GoldenResult run_golden(const CorpusCase& c);

}  // namespace ciff
