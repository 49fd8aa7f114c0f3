#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ciff {

// N-queens with one abducible per queen position and a pairwise safety constraint.
std::string nqueens_program(int n);
std::string nqueens_query(int n);

// N-queens where every row demands a queen in some column and clashes are denials.
std::string nqueens_denial_program(int n);

struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;  // 1-based
};

// DIMACS graph format: `c` comments, one `p edge <n> <m>` line, `e <u> <v>` lines.
Graph parse_dimacs(const std::string& text);
Graph triangle();
Graph path(int n);

std::string coloring_program(const Graph& g, int colors);

std::string webrepair_program();

}  // namespace ciff
