#ifndef PCBO_PC_HPP
#define PCBO_PC_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pcbo/gbn_sim.hpp"
#include "pcbo/graph.hpp"
#include "pcbo/theta.hpp"

namespace pcbo {

/// Source of conditional-independence decisions for the skeleton search.
class CiOracle {
public:
    virtual ~CiOracle() = default;
    virtual int num_vars() const = 0;
    virtual bool independent(int i, int j, std::span<const int> C) const = 0;
};

/// Sample version: statistical test chosen by theta on a dataset.
class DataCiOracle final : public CiOracle {
public:
    DataCiOracle(const Dataset& data, Theta theta);
    int num_vars() const override { return data_.p(); }
    bool independent(int i, int j, std::span<const int> C) const override;

private:
    const Dataset& data_;
    Theta theta_;
};

/// Population version: exact partial correlations from a known correlation
/// matrix, declared zero below a threshold.
class PopulationCiOracle final : public CiOracle {
public:
    explicit PopulationCiOracle(Eigen::MatrixXd corr, double threshold = 1e-8);
    int num_vars() const override { return static_cast<int>(corr_.rows()); }
    bool independent(int i, int j, std::span<const int> C) const override;

private:
    Eigen::MatrixXd corr_;
    double threshold_;
};

/// Separation sets keyed by unordered vertex pair.
class SepSets {
public:
    void set(int a, int b, std::vector<int> C);
    bool contains(int a, int b) const;
    const std::vector<int>& at(int a, int b) const;
    std::size_t size() const { return sets_.size(); }
    const std::map<std::pair<int, int>, std::vector<int>>& entries() const { return sets_; }

private:
    static std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }
    std::map<std::pair<int, int>, std::vector<int>> sets_;
};

struct SkeletonResult {
    Pdag skeleton;
    SepSets sepsets;
    std::size_t test_calls = 0;
    int levels = 0;
    /// Set when max_cond stopped the search before the natural termination.
    bool truncated = false;
};

/// PC-stable skeleton search. Adjacency sets are frozen at the start of
/// every level; conditioning sets come from adj(i)\{j} and then adj(j)\{i},
/// each enumerated in lexicographic order.
SkeletonResult estimate_skeleton(const CiOracle& oracle, std::optional<int> max_cond = std::nullopt);
SkeletonResult estimate_skeleton(const Dataset& data, const Theta& theta, std::optional<int> max_cond = std::nullopt);

/// A v-structure that would have reversed an orientation made earlier.
struct OrientationConflict {
    int from = 0;
    int to = 0;
    int collider = 0;
};

/// Orients i -> k <- j for every unshielded triple with k outside sepset(i, j).
/// Triples are visited by collider, then (i, j) ascending; an orientation made
/// earlier is never reversed and the clash is appended to `conflicts`.
/// Throws ConsistencyError when a non-adjacent pair has no separation set.
Pdag orient_v_structures(const Pdag& skeleton, const SepSets& seps,
                         std::vector<OrientationConflict>* conflicts = nullptr);

struct PcOptions {
    std::optional<int> max_cond;
};

struct PcResult {
    Cpdag cpdag;
    SepSets sepsets;
    std::size_t test_calls = 0;
    bool truncated = false;
    std::vector<OrientationConflict> conflicts;
    double wall_time_s = 0.0;
};

PcResult pc_stable_detailed(const CiOracle& oracle, const PcOptions& options = {});
PcResult pc_stable_detailed(const Dataset& data, const Theta& theta, const PcOptions& options = {});

/// skeleton -> v-structures -> Meek closure.
Cpdag pc_stable(const Dataset& data, const Theta& theta, const PcOptions& options = {});

/// One learning run as a JSON object: theta, scenario id, CPDAG text,
/// separation sets (1-based), test-call count and wall time.
std::string pc_result_json(const PcResult& result, const Theta& theta, const std::string& scenario_id);

}  // namespace pcbo

#endif  // PCBO_PC_HPP
