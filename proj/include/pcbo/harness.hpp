#ifndef PCBO_HARNESS_HPP
#define PCBO_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pcbo/bo.hpp"
#include "pcbo/evaluation.hpp"
#include "pcbo/gbn_sim.hpp"

namespace pcbo {

struct ExperimentConfig {
    std::vector<int> p_grid{25, 50};
    std::vector<double> n_grid{2, 8};
    std::vector<int> N_grid{50, 100};
    int replicas = 10;
    int budget = 30;
    std::uint64_t base_seed = 20190801;
    std::vector<Method> methods{Method::BO, Method::RS, Method::EC};
    std::string output_dir = "results";
    double noise_var = 1.0;
    /// Cap on conditioning-set size inside PC; negative means unlimited.
    int max_cond = -1;
    /// Real timings in the traces make them non-reproducible byte for byte,
    /// so they are written as 0 unless this is set.
    bool record_wall_time = false;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;

    /// p in {25,50}, n in {2,8}, N in {50,100}: 8 scenarios, 10 replicas.
    static ExperimentConfig desk_scale();
    /// p in {25,50,75,100}, n in {2,8}, N in {25,50,75,100}: 32 scenarios, 40 replicas.
    static ExperimentConfig full_scale();

    void validate() const;
};

/// Flat `key = value` document; lists are comma separated, '#' starts a comment.
/// Unknown keys are rejected. Keys absent from the file keep `base`'s values.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);

/// Cartesian product of the grids: p outer, n middle, N inner.
std::vector<ScenarioSpec> build_scenarios(const ExperimentConfig& config);

/// Simulates every scenario of one replica from streams derived from
/// (base_seed, replica, scenario, purpose).
ReplicaContext materialize_replica(const ExperimentConfig& config, const std::vector<ScenarioSpec>& scenarios,
                                   int replica);

/// Seed of the random stream a method uses in a replica.
std::uint64_t method_seed(const ExperimentConfig& config, int replica, Method method);

/// One trace line with the fields iteration, method, alpha, test, y,
/// best_so_far, wall_time_s, replica, seed.
std::string trace_line(const TrialRecord& record, int replica, std::uint64_t seed, bool with_wall_time);
std::vector<TrialRecord> read_trace(const std::filesystem::path& path);

struct RunSummary {
    std::filesystem::path output_dir;
    int units_run = 0;
    int units_skipped = 0;
    std::size_t objective_evaluations = 0;
    std::vector<std::string> failures;
};

/// Runs every (replica, method) unit that is not already marked done in the
/// manifest. Writes <out>/replica_<r>/<method>.jsonl, config.json and
/// manifest.json.
RunSummary run_experiment(const ExperimentConfig& config);

struct MethodReport {
    int replicas = 0;
    int incomplete = 0;
    std::map<TestKind, int> test_counts;
    std::vector<int> alpha_counts;  // 20 log-uniform bins over [1e-5, 1e-1]
    std::vector<double> curve_mean;
    std::vector<double> curve_std;
    std::vector<double> final_best;  // per replica, last best_so_far
    double alpha_mass_below_0025 = 0.0;
    TestKind mode_test = TestKind::FisherZ;
};

struct ReportSummary {
    double global_best = 0.0;
    std::map<Method, MethodReport> methods;
};

inline constexpr int kAlphaBins = 20;
inline constexpr double kCurveEpsilon = 1e-6;

/// Reads all traces under `results_dir` and writes report/curves.csv,
/// report/hist_tests.csv, report/hist_alpha.csv and report/summary.csv.
ReportSummary report(const std::filesystem::path& results_dir);

}  // namespace pcbo

#endif  // PCBO_HARNESS_HPP
