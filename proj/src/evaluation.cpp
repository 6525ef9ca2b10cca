#include "pcbo/evaluation.hpp"

#include "pcbo/error.hpp"

namespace pcbo {

namespace {

// 0 absent, 1 undirected, 2 a -> b, 3 b -> a
int pair_status(const Pdag& g, int a, int b) {
    if (!g.adjacent(a, b)) return 0;
    if (g.has_undirected(a, b)) return 1;
    return g.has_directed(a, b) ? 2 : 3;
}

}  // namespace

int shd(const Pdag& a, const Pdag& b) {
    if (a.size() != b.size()) throw InvalidInput("shd: graphs have different vertex counts");
    int d = 0;
    for (int u = 0; u < a.size(); ++u) {
        for (int v = u + 1; v < a.size(); ++v) d += pair_status(a, u, v) != pair_status(b, u, v);
    }
    return d;
}

int shd(const Cpdag& a, const Cpdag& b) { return shd(a.graph(), b.graph()); }

double normalized_shd(const Cpdag& a, const Cpdag& b) {
    const int p = a.size();
    if (p < 2) throw InvalidInput("normalized_shd: need at least two vertices");
    const double max_edges = 0.5 * p * (p - 1);
    return shd(a, b) / max_edges;
}

ObjectiveValue objective(const Theta& theta, const ReplicaContext& replica, const PcOptions& options) {
    if (replica.scenarios.empty()) throw InvalidInput("objective: replica has no scenarios");
    ObjectiveValue out;
    out.per_scenario.reserve(replica.scenarios.size());
    double sum = 0.0;
    for (const auto& sc : replica.scenarios) {
        Cpdag learned = pc_stable(sc.data, theta, options);
        double v = normalized_shd(learned, sc.truth);
        out.per_scenario.emplace_back(sc.spec, v);
        sum += v;
    }
    out.mean_nshd = sum / static_cast<double>(replica.scenarios.size());
    return out;
}

}  // namespace pcbo
