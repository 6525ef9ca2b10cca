#ifndef PCBO_GRAPH_HPP
#define PCBO_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pcbo {

/// Ordered vertex pair; for directed edges `first -> second`. Vertices are 0-based.
using Edge = std::pair<int, int>;

/// Partially directed graph over vertices 0..p-1.
///
/// Stored as a p x p mark matrix: mark(a, b) set means there is an edge
/// endpoint leaving a towards b. An undirected edge a -- b has both marks,
/// a directed edge a -> b only mark(a, b).
class Pdag {
public:
    Pdag() = default;
    explicit Pdag(int p);

    int size() const { return p_; }

    bool adjacent(int a, int b) const { return mark(a, b) || mark(b, a); }
    bool has_directed(int from, int to) const { return mark(from, to) && !mark(to, from); }
    bool has_undirected(int a, int b) const { return mark(a, b) && mark(b, a); }

    /// Sets the pair {from, to} to the directed edge from -> to, replacing
    /// whatever was there.
    void set_directed(int from, int to);
    /// Sets the pair {a, b} to the undirected edge a -- b.
    void set_undirected(int a, int b);
    void remove(int a, int b);

    /// All vertices adjacent to v, ascending.
    std::vector<int> neighbors(int v) const;
    /// u with u -- v.
    std::vector<int> undirected_neighbors(int v) const;
    /// u with u -> v.
    std::vector<int> parents(int v) const;
    /// u with v -> u.
    std::vector<int> children(int v) const;

    /// Directed edges (from, to), sorted.
    std::vector<Edge> directed_edges() const;
    /// Undirected edges (a, b) with a < b, sorted.
    std::vector<Edge> undirected_edges() const;
    std::size_t num_edges() const;

    /// Same skeleton, all edges undirected.
    Pdag skeleton() const;

    friend bool operator==(const Pdag& x, const Pdag& y) { return x.p_ == y.p_ && x.marks_ == y.marks_; }

private:
    bool mark(int a, int b) const { return marks_[static_cast<std::size_t>(a) * p_ + b] != 0; }
    void set_mark(int a, int b, bool on) { marks_[static_cast<std::size_t>(a) * p_ + b] = on ? 1 : 0; }
    void check_pair(int a, int b) const;

    int p_ = 0;
    std::vector<std::uint8_t> marks_;
};

/// True iff the directed edge set over p vertices admits a topological order.
bool is_acyclic(int p, const std::vector<Edge>& edges);

/// Directed acyclic graph. Construction validates acyclicity, self-loops and duplicates.
class Dag {
public:
    Dag() = default;
    Dag(int p, const std::vector<Edge>& edges);

    int size() const { return graph_.size(); }
    bool has_edge(int from, int to) const { return graph_.has_directed(from, to); }
    bool adjacent(int a, int b) const { return graph_.adjacent(a, b); }
    std::vector<int> parents(int v) const { return graph_.parents(v); }
    std::vector<int> children(int v) const { return graph_.children(v); }
    std::vector<Edge> edges() const { return graph_.directed_edges(); }
    std::size_t num_edges() const { return graph_.num_edges(); }
    /// A topological order of the vertices (smallest index first among ties).
    std::vector<int> topological_order() const;

    const Pdag& as_pdag() const { return graph_; }

    friend bool operator==(const Dag& x, const Dag& y) { return x.graph_ == y.graph_; }

private:
    Pdag graph_;
};

/// Completed partially directed acyclic graph: representative of a Markov
/// equivalence class. Produced by dag_to_cpdag and by the PC learner.
class Cpdag {
public:
    Cpdag() = default;
    /// Wraps a graph the caller asserts is Meek-closed.
    explicit Cpdag(Pdag g) : graph_(std::move(g)) {}

    int size() const { return graph_.size(); }
    const Pdag& graph() const { return graph_; }

    friend bool operator==(const Cpdag& x, const Cpdag& y) { return x.graph_ == y.graph_; }

private:
    Pdag graph_;
};

/// Closes g under Meek rules R1-R4. Only orients undirected edges; never
/// removes an edge or flips an existing orientation.
Pdag apply_meek_rules(Pdag g);

/// Unshielded colliders a -> c <- b (a < b) of a DAG.
std::vector<std::pair<Edge, int>> v_structures(const Dag& g);

/// CPDAG of g's Markov equivalence class: v-structure edges stay directed,
/// everything else starts undirected and is closed under the Meek rules.
Cpdag dag_to_cpdag(const Dag& g);

/// Relabels vertex v as perm[v].
Pdag permute(const Pdag& g, const std::vector<int>& perm);

// Graph text format: first line p, then `j -> i` or `j -- i` per edge,
// 1-based vertices, '#' comment lines.
Pdag parse_graph(std::istream& in);
Pdag parse_graph(const std::string& text);
std::string format_graph(const Pdag& g);

}  // namespace pcbo

#endif  // PCBO_GRAPH_HPP
