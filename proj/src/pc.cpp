#include "pcbo/pc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"

#include "pcbo/ci_tests.hpp"
#include "pcbo/error.hpp"

namespace pcbo {

DataCiOracle::DataCiOracle(const Dataset& data, Theta theta) : data_(data), theta_(theta) { theta_.validate(); }

bool DataCiOracle::independent(int i, int j, std::span<const int> C) const {
    return ci_decision(data_, i, j, C, theta_);
}

PopulationCiOracle::PopulationCiOracle(Eigen::MatrixXd corr, double threshold)
    : corr_(std::move(corr)), threshold_(threshold) {
    if (corr_.rows() != corr_.cols()) throw InvalidInput("population oracle: correlation matrix must be square");
}

bool PopulationCiOracle::independent(int i, int j, std::span<const int> C) const {
    return std::abs(partial_correlation(corr_, i, j, C)) < threshold_;
}

void SepSets::set(int a, int b, std::vector<int> C) { sets_[key(a, b)] = std::move(C); }

bool SepSets::contains(int a, int b) const { return sets_.count(key(a, b)) != 0; }

const std::vector<int>& SepSets::at(int a, int b) const {
    auto it = sets_.find(key(a, b));
    if (it == sets_.end()) {
        throw ConsistencyError("no separation set for pair " + std::to_string(a + 1) + ", " + std::to_string(b + 1));
    }
    return it->second;
}

namespace {

// Calls fn on every size-l subset of pool (lexicographic by position) until fn returns true.
template <typename Fn>
bool for_each_subset(const std::vector<int>& pool, int l, Fn&& fn) {
    const int m = static_cast<int>(pool.size());
    if (l > m) return false;
    std::vector<int> pos(l);
    for (int k = 0; k < l; ++k) pos[k] = k;
    std::vector<int> subset(l);
    while (true) {
        for (int k = 0; k < l; ++k) subset[k] = pool[pos[k]];
        if (fn(subset)) return true;
        int k = l - 1;
        while (k >= 0 && pos[k] == m - l + k) --k;
        if (k < 0) return false;
        ++pos[k];
        for (int q = k + 1; q < l; ++q) pos[q] = pos[q - 1] + 1;
    }
}

std::vector<int> without(const std::vector<int>& v, int x) {
    std::vector<int> out;
    out.reserve(v.size());
    for (int u : v) {
        if (u != x) out.push_back(u);
    }
    return out;
}

}  // namespace

SkeletonResult estimate_skeleton(const CiOracle& oracle, std::optional<int> max_cond) {
    const int p = oracle.num_vars();
    SkeletonResult res;
    res.skeleton = Pdag(p);
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) res.skeleton.set_undirected(a, b);
    }

    for (int l = 0;; ++l) {
        std::vector<std::vector<int>> adj(p);
        for (int v = 0; v < p; ++v) adj[v] = res.skeleton.neighbors(v);

        bool any_testable = false;
        for (int i = 0; i < p; ++i) {
            // Some edge (i, j) with |adj(i) \ {j}| >= l.
            if (!adj[i].empty() && static_cast<int>(adj[i].size()) - 1 >= l) {
                any_testable = true;
                break;
            }
        }
        if (!any_testable) break;
        if (max_cond && l > *max_cond) {
            res.truncated = true;
            break;
        }
        res.levels = l + 1;

        std::vector<Edge> removals;
        for (int i = 0; i < p; ++i) {
            for (int j : adj[i]) {
                if (j <= i) continue;
                std::vector<int> found;
                bool separated = false;
                auto test = [&](const std::vector<int>& C) {
                    ++res.test_calls;
                    if (oracle.independent(i, j, C)) {
                        found = C;
                        return true;
                    }
                    return false;
                };
                const auto from_i = without(adj[i], j);
                separated = for_each_subset(from_i, l, test);
                if (!separated) {
                    const auto from_j = without(adj[j], i);
                    separated = for_each_subset(from_j, l, [&](const std::vector<int>& C) {
                        // Sets that also lie inside adj(i) were already tested.
                        bool seen = std::all_of(C.begin(), C.end(), [&](int c) {
                            return std::find(from_i.begin(), from_i.end(), c) != from_i.end();
                        });
                        return !seen && test(C);
                    });
                }
                if (separated) {
                    removals.emplace_back(i, j);
                    res.sepsets.set(i, j, std::move(found));
                }
            }
        }
        for (auto [i, j] : removals) res.skeleton.remove(i, j);
    }
    return res;
}

SkeletonResult estimate_skeleton(const Dataset& data, const Theta& theta, std::optional<int> max_cond) {
    DataCiOracle oracle(data, theta);
    return estimate_skeleton(oracle, max_cond);
}

Pdag orient_v_structures(const Pdag& skeleton, const SepSets& seps, std::vector<OrientationConflict>* conflicts) {
    const int p = skeleton.size();
    Pdag out = skeleton;
    auto orient = [&](int from, int to) {
        if (out.has_directed(to, from)) {
            if (conflicts) conflicts->push_back({from, to, to});
            return;
        }
        out.set_directed(from, to);
    };
    for (int k = 0; k < p; ++k) {
        const auto nb = skeleton.neighbors(k);
        for (std::size_t x = 0; x < nb.size(); ++x) {
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const int i = nb[x];
                const int j = nb[y];
                if (skeleton.adjacent(i, j)) continue;
                const auto& sep = seps.at(i, j);
                if (std::find(sep.begin(), sep.end(), k) != sep.end()) continue;
                orient(i, k);
                orient(j, k);
            }
        }
    }
    return out;
}

PcResult pc_stable_detailed(const CiOracle& oracle, const PcOptions& options) {
    auto start = std::chrono::steady_clock::now();
    SkeletonResult skel = estimate_skeleton(oracle, options.max_cond);
    PcResult res;
    Pdag oriented = orient_v_structures(skel.skeleton, skel.sepsets, &res.conflicts);
    res.cpdag = Cpdag(apply_meek_rules(std::move(oriented)));
    res.sepsets = std::move(skel.sepsets);
    res.test_calls = skel.test_calls;
    res.truncated = skel.truncated;
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

PcResult pc_stable_detailed(const Dataset& data, const Theta& theta, const PcOptions& options) {
    DataCiOracle oracle(data, theta);
    return pc_stable_detailed(oracle, options);
}

Cpdag pc_stable(const Dataset& data, const Theta& theta, const PcOptions& options) {
    return pc_stable_detailed(data, theta, options).cpdag;
}

std::string pc_result_json(const PcResult& result, const Theta& theta, const std::string& scenario_id) {
    nlohmann::ordered_json j;
    j["theta"] = {{"alpha", theta.alpha()}, {"test", std::string(to_string(theta.test))}};
    j["scenario"] = scenario_id;
    j["cpdag"] = format_graph(result.cpdag.graph());
    nlohmann::ordered_json seps = nlohmann::ordered_json::array();
    for (const auto& [pair, C] : result.sepsets.entries()) {
        std::vector<int> one_based;
        for (int c : C) one_based.push_back(c + 1);
        seps.push_back({{"pair", {pair.first + 1, pair.second + 1}}, {"set", one_based}});
    }
    j["sepsets"] = std::move(seps);
    j["test_calls"] = result.test_calls;
    j["truncated"] = result.truncated;
    j["conflicts"] = result.conflicts.size();
    j["wall_time_s"] = result.wall_time_s;
    return j.dump();
}

}  // namespace pcbo
