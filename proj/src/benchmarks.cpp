#include "ciff/benchmarks.hpp"

#include <sstream>
#include <stdexcept>

namespace ciff {

std::string nqueens_program(int n) {
    std::ostringstream o;
    o << "abducible(q_pos(_,_)).\n"
      << "q_domain(R) :- R #>= 1, R #=< " << n << ".\n"
      << "exists_q(R) :- q_domain(R),q_pos(R,C),q_domain(C).\n"
      << "safe(R1,C1,R2,C2) :- C1#\\=C2, R1+C1#\\=R2+C2, C1-R1#\\=C2-R2.\n"
      << "[q_pos(R1,C1),q_pos(R2,C2),R1#\\=R2] implies [safe(R1,C1,R2,C2)].\n";
    return o.str();
}

std::string nqueens_query(int n) {
    std::string q;
    for (int i = 1; i <= n; ++i) q += (i > 1 ? "," : "") + std::string("exists_q(") + std::to_string(i) + ")";
    return q;
}

std::string nqueens_denial_program(int n) {
    std::ostringstream o;
    o << "abducible(q_pos(_,_)).\n";
    for (int i = 1; i <= n; ++i) o << "row(" << i << ").\n";
    o << "[row(R)] implies [";
    for (int c = 1; c <= n; ++c) o << (c > 1 ? "," : "") << "q_pos(R," << c << ")";
    o << "].\n"
      << "[q_pos(R1,C),q_pos(R2,C),R1\\==R2] implies [false].\n"
      << "[q_pos(R1,C1),q_pos(R2,C2),R1\\==R2,abs(R1-R2)#=abs(C1-C2)] implies [false].\n";
    return o.str();
}

Graph parse_dimacs(const std::string& text) {
    Graph g;
    bool header = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag == "c") continue;
        if (tag == "p") {
            std::string fmt;
            std::size_t m = 0;
            if (!(ls >> fmt >> g.vertices >> m) || g.vertices < 0)
                throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed problem line");
            header = true;
        } else if (tag == "e") {
            int u = 0, v = 0;
            if (!header) throw std::invalid_argument("line " + std::to_string(lineno) + ": edge before problem line");
            if (!(ls >> u >> v) || u < 1 || v < 1 || u > g.vertices || v > g.vertices)
                throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed edge");
            g.edges.emplace_back(u, v);
        } else {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown line type '" + tag + "'");
        }
    }
    if (!header) throw std::invalid_argument("missing problem line");
    return g;
}

Graph triangle() { return Graph{3, {{1, 2}, {2, 3}, {1, 3}}}; }

Graph path(int n) {
    Graph g{n, {}};
    for (int i = 1; i < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

std::string coloring_program(const Graph& g, int colors) {
    std::ostringstream o;
    o << "abducible(abd_color(_,_)).\n"
      << "coloring(X) :- color(C),abd_color(X,C).\n"
      << "[vertex(X)] implies [coloring(X)].\n"
      << "[edge(X,Y),abd_color(X,C),abd_color(Y,C)] implies [false].\n";
    for (int v = 1; v <= g.vertices; ++v) o << "vertex(v" << v << ").\n";
    for (const auto& [u, v] : g.edges) o << "edge(v" << u << ",v" << v << ").\n";
    for (int c = 1; c <= colors; ++c) o << "color(c" << c << ").\n";
    return o.str();
}

std::string webrepair_program() {
    return "abducible(add_node(_,_)).\n"
           "abducible(add_link(_,_)).\n"
           "is_node(N,T) :- node(N,T), node_type(T).\n"
           "is_node(N,T) :- add_node(N,T), node_type(T).\n"
           "node_type(lib).\n"
           "node_type(book).\n"
           "node_type(review).\n"
           "is_link(N1,N2) :- link(N1,N2), link_check(N1,N2).\n"
           "is_link(N1,N2) :- add_link(N1,N2), link_check(N1,N2).\n"
           "link_check(N1,N2) :- is_node(N1,_), is_node(N2,_), N1 \\== N2.\n"
           "book_links(B) :- is_node(B,book), is_node(R,review), is_link(B,R), is_node(L,lib), is_link(B,L).\n"
           "[add_node(N,T1), node(N,T2)] implies [false].\n"
           "[add_link(N1,N2), link(N1,N2)] implies [false].\n"
           "[is_node(N,T1), is_node(N,T2), T1 \\== T2] implies [false].\n"
           "[is_node(B,book)] implies [book_links(B)].\n"
           "node(n1,book).\n"
           "node(n3,review).\n"
           "link(n1,n3).\n";
}

}  // namespace ciff
