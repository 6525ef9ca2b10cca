#include "pcbo/graph.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <queue>
#include <sstream>

#include "pcbo/error.hpp"

namespace pcbo {

Pdag::Pdag(int p) : p_(p), marks_(static_cast<std::size_t>(p) * std::max(p, 0), 0) {
    if (p < 0) throw InvalidInput("vertex count must be non-negative");
}

void Pdag::check_pair(int a, int b) const {
    if (a < 0 || b < 0 || a >= p_ || b >= p_) {
        throw InvalidInput("vertex index out of range: " + std::to_string(a) + ", " + std::to_string(b));
    }
    if (a == b) throw InvalidInput("self-loop on vertex " + std::to_string(a + 1));
}

void Pdag::set_directed(int from, int to) {
    check_pair(from, to);
    set_mark(from, to, true);
    set_mark(to, from, false);
}

void Pdag::set_undirected(int a, int b) {
    check_pair(a, b);
    set_mark(a, b, true);
    set_mark(b, a, true);
}

void Pdag::remove(int a, int b) {
    check_pair(a, b);
    set_mark(a, b, false);
    set_mark(b, a, false);
}

std::vector<int> Pdag::neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < p_; ++u) {
        if (u != v && adjacent(u, v)) out.push_back(u);
    }
    return out;
}

std::vector<int> Pdag::undirected_neighbors(int v) const {
    std::vector<int> out;
    for (int u = 0; u < p_; ++u) {
        if (u != v && has_undirected(u, v)) out.push_back(u);
    }
    return out;
}

std::vector<int> Pdag::parents(int v) const {
    std::vector<int> out;
    for (int u = 0; u < p_; ++u) {
        if (u != v && has_directed(u, v)) out.push_back(u);
    }
    return out;
}

std::vector<int> Pdag::children(int v) const {
    std::vector<int> out;
    for (int u = 0; u < p_; ++u) {
        if (u != v && has_directed(v, u)) out.push_back(u);
    }
    return out;
}

std::vector<Edge> Pdag::directed_edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < p_; ++a) {
        for (int b = 0; b < p_; ++b) {
            if (a != b && has_directed(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

std::vector<Edge> Pdag::undirected_edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < p_; ++a) {
        for (int b = a + 1; b < p_; ++b) {
            if (has_undirected(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

std::size_t Pdag::num_edges() const {
    std::size_t n = 0;
    for (int a = 0; a < p_; ++a) {
        for (int b = a + 1; b < p_; ++b) {
            if (adjacent(a, b)) ++n;
        }
    }
    return n;
}

Pdag Pdag::skeleton() const {
    Pdag out(p_);
    for (int a = 0; a < p_; ++a) {
        for (int b = a + 1; b < p_; ++b) {
            if (adjacent(a, b)) out.set_undirected(a, b);
        }
    }
    return out;
}

bool is_acyclic(int p, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> out(p);
    std::vector<int> indegree(p, 0);
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= p || b >= p) return false;
        out[a].push_back(b);
        ++indegree[b];
    }
    std::vector<int> ready;
    for (int v = 0; v < p; ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    int visited = 0;
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        ++visited;
        for (int w : out[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    return visited == p;
}

Dag::Dag(int p, const std::vector<Edge>& edges) : graph_(p) {
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= p || b >= p) throw InvalidInput("edge endpoint out of range");
        if (a == b) throw InvalidInput("self-loop on vertex " + std::to_string(a + 1));
        if (graph_.adjacent(a, b)) {
            throw InvalidInput("duplicate edge between " + std::to_string(a + 1) + " and " + std::to_string(b + 1));
        }
        graph_.set_directed(a, b);
    }
    if (!is_acyclic(p, edges)) throw InvalidInput("edge set contains a directed cycle");
}

std::vector<int> Dag::topological_order() const {
    const int p = size();
    std::vector<int> indegree(p, 0);
    for (auto [a, b] : edges()) ++indegree[b];
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < p; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<int> order;
    order.reserve(p);
    while (!ready.empty()) {
        int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int w : children(v)) {
            if (--indegree[w] == 0) ready.push(w);
        }
    }
    return order;
}

namespace {

// R1: c -> a, a -- b, c and b non-adjacent  =>  a -> b
bool meek_r1(const Pdag& g, int a, int b) {
    for (int c : g.parents(a)) {
        if (c != b && !g.adjacent(c, b)) return true;
    }
    return false;
}

// R2: a -> c -> b, a -- b  =>  a -> b
bool meek_r2(const Pdag& g, int a, int b) {
    for (int c : g.children(a)) {
        if (g.has_directed(c, b)) return true;
    }
    return false;
}

// R3: a -- c, a -- d, c -> b, d -> b, c and d non-adjacent, a -- b  =>  a -> b
bool meek_r3(const Pdag& g, int a, int b) {
    std::vector<int> mid;
    for (int c : g.undirected_neighbors(a)) {
        if (c != b && g.has_directed(c, b)) mid.push_back(c);
    }
    for (std::size_t x = 0; x < mid.size(); ++x) {
        for (std::size_t y = x + 1; y < mid.size(); ++y) {
            if (!g.adjacent(mid[x], mid[y])) return true;
        }
    }
    return false;
}

// R4: a -- b, d -> c -> b, a -- d, a adjacent to c, d and b non-adjacent  =>  a -> b
bool meek_r4(const Pdag& g, int a, int b) {
    for (int c : g.parents(b)) {
        if (c == a || !g.adjacent(a, c)) continue;
        for (int d : g.parents(c)) {
            if (d != a && d != b && g.has_undirected(a, d) && !g.adjacent(d, b)) return true;
        }
    }
    return false;
}

}  // namespace

Pdag apply_meek_rules(Pdag g) {
    const int p = g.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < p; ++a) {
            for (int b = 0; b < p; ++b) {
                if (a == b || !g.has_undirected(a, b)) continue;
                if (meek_r1(g, a, b) || meek_r2(g, a, b) || meek_r3(g, a, b) || meek_r4(g, a, b)) {
                    g.set_directed(a, b);
                    changed = true;
                }
            }
        }
    }
    return g;
}

std::vector<std::pair<Edge, int>> v_structures(const Dag& g) {
    std::vector<std::pair<Edge, int>> out;
    for (int c = 0; c < g.size(); ++c) {
        auto pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x) {
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                if (!g.adjacent(pa[x], pa[y])) out.push_back({{pa[x], pa[y]}, c});
            }
        }
    }
    return out;
}

Cpdag dag_to_cpdag(const Dag& g) {
    Pdag out = g.as_pdag().skeleton();
    for (const auto& [ends, c] : v_structures(g)) {
        out.set_directed(ends.first, c);
        out.set_directed(ends.second, c);
    }
    return Cpdag(apply_meek_rules(std::move(out)));
}

Pdag permute(const Pdag& g, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != g.size()) throw InvalidInput("permutation size mismatch");
    Pdag out(g.size());
    for (auto [a, b] : g.directed_edges()) out.set_directed(perm[a], perm[b]);
    for (auto [a, b] : g.undirected_edges()) out.set_undirected(perm[a], perm[b]);
    return out;
}

Pdag parse_graph(std::istream& in) {
    std::string line;
    int p = -1;
    Pdag g;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (p < 0) {
            if (!(ls >> p) || p < 1) throw InvalidInput("graph: expected positive vertex count on line " + std::to_string(lineno));
            g = Pdag(p);
            continue;
        }
        int a = 0, b = 0;
        std::string op;
        if (!(ls >> a >> op >> b) || (op != "->" && op != "--")) {
            throw InvalidInput("graph: malformed edge on line " + std::to_string(lineno));
        }
        if (a < 1 || b < 1 || a > p || b > p || a == b) {
            throw InvalidInput("graph: bad vertex on line " + std::to_string(lineno));
        }
        if (g.adjacent(a - 1, b - 1)) throw InvalidInput("graph: duplicate edge on line " + std::to_string(lineno));
        if (op == "->") {
            g.set_directed(a - 1, b - 1);
        } else {
            g.set_undirected(a - 1, b - 1);
        }
    }
    if (p < 0) throw InvalidInput("graph: empty input");
    return g;
}

Pdag parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

std::string format_graph(const Pdag& g) {
    std::ostringstream out;
    out << g.size() << '\n';
    for (auto [a, b] : g.directed_edges()) out << a + 1 << " -> " << b + 1 << '\n';
    for (auto [a, b] : g.undirected_edges()) out << a + 1 << " -- " << b + 1 << '\n';
    return out.str();
}

}  // namespace pcbo
