#ifndef PCBO_EVALUATION_HPP
#define PCBO_EVALUATION_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pcbo/gbn_sim.hpp"
#include "pcbo/graph.hpp"
#include "pcbo/pc.hpp"
#include "pcbo/theta.hpp"

namespace pcbo {

/// Structural Hamming distance: number of vertex pairs whose status
/// (absent, undirected, a -> b, b -> a) differs. Throws on size mismatch.
int shd(const Pdag& a, const Pdag& b);
int shd(const Cpdag& a, const Cpdag& b);

/// shd / (p (p - 1) / 2). Throws InvalidInput for p < 2.
double normalized_shd(const Cpdag& a, const Cpdag& b);

/// One simulated network with its data, frozen for a replica.
struct ScenarioInstance {
    ScenarioSpec spec;
    Gbn gbn;
    Dataset data;
    Cpdag truth;
};

/// Everything a replica's objective evaluations share. Built once per
/// replica and reused unchanged by every tuning method.
struct ReplicaContext {
    int replica = 0;
    std::vector<ScenarioInstance> scenarios;
};

struct ObjectiveValue {
    double mean_nshd = 0.0;
    std::vector<std::pair<ScenarioSpec, double>> per_scenario;
};

/// Average normalized SHD between pc_stable(data, theta) and the true CPDAG
/// over the replica's scenarios.
ObjectiveValue objective(const Theta& theta, const ReplicaContext& replica, const PcOptions& options = {});

}  // namespace pcbo

#endif  // PCBO_EVALUATION_HPP
