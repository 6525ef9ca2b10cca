#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pcbo/gbn_sim.hpp"
#include "pcbo/graph.hpp"

namespace testing_support {

// Every DAG on p labelled nodes, built by choosing absent / forward / backward
// for each unordered pair and dropping the cyclic ones.
inline std::vector<std::vector<pcbo::Edge>> all_dags(int p) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
    std::vector<std::vector<pcbo::Edge>> out;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<pcbo::Edge> edges;
        std::size_t c = code;
        for (auto [a, b] : pairs) {
            const int choice = static_cast<int>(c % 3);
            c /= 3;
            if (choice == 1) edges.emplace_back(a, b);
            if (choice == 2) edges.emplace_back(b, a);
        }
        // Acyclicity by repeated removal of sources.
        std::vector<int> indeg(p, 0);
        for (auto [a, b] : edges) ++indeg[b];
        std::vector<bool> gone(p, false);
        int removed = 0;
        bool progress = true;
        while (progress) {
            progress = false;
            for (int v = 0; v < p; ++v) {
                if (!gone[v] && indeg[v] == 0) {
                    gone[v] = true;
                    ++removed;
                    progress = true;
                    for (auto [a, b] : edges)
                        if (a == v) --indeg[b];
                }
            }
        }
        if (removed == p) out.push_back(edges);
    }
    return out;
}

struct Signature {
    std::vector<std::vector<bool>> adj;
    std::vector<std::vector<std::vector<bool>>> collider;  // [a][b][k], a<b non-adjacent, a->k<-b
    bool operator==(const Signature&) const = default;
};

inline Signature signature(int p, const std::vector<pcbo::Edge>& edges) {
    Signature s;
    s.adj.assign(p, std::vector<bool>(p, false));
    std::vector<std::vector<bool>> dir(p, std::vector<bool>(p, false));
    for (auto [a, b] : edges) {
        s.adj[a][b] = s.adj[b][a] = true;
        dir[a][b] = true;
    }
    s.collider.assign(p, std::vector<std::vector<bool>>(p, std::vector<bool>(p, false)));
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (!s.adj[a][b])
                for (int k = 0; k < p; ++k) s.collider[a][b][k] = dir[a][k] && dir[b][k];
    return s;
}

inline pcbo::Gbn make_gbn(int p, const std::vector<pcbo::Edge>& edges, const std::vector<double>& weights,
                          double noise = 1.0) {
    pcbo::Dag dag(p, edges);
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < edges.size(); ++k) beta(edges[k].first, edges[k].second) = weights[k];
    return pcbo::Gbn(dag, beta, Eigen::VectorXd::Constant(p, noise));
}

}  // namespace testing_support
