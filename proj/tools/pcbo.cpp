#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pcbo/error.hpp"
#include "pcbo/harness.hpp"
#include "pcbo/pc.hpp"

namespace {

using json = nlohmann::ordered_json;

int fail(const std::string& kind, const std::string& message, int code) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw pcbo::InvalidInput("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PC-stable structure learning with Bayesian-optimization hyperparameter tuning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PCBO_VERSION);

    auto* sim = app.add_subcommand("simulate", "Sample a Gaussian Bayesian network and a dataset from it");
    int sim_p = 10;
    double sim_n = 2.0;
    int sim_N = 100;
    std::uint64_t sim_seed = 1;
    std::string sim_prefix = "scenario";
    sim->add_option("--p", sim_p, "Number of nodes")->check(CLI::PositiveNumber);
    sim->add_option("--n", sim_n, "Average neighbour size");
    sim->add_option("--N", sim_N, "Sample size")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Random seed");
    sim->add_option("--out", sim_prefix, "Output prefix; writes <prefix>.gbn, <prefix>.csv, <prefix>.cpdag");

    auto* pcr = app.add_subcommand("pc-run", "Learn a CPDAG from a CSV dataset with PC-stable");
    std::string pc_data;
    double pc_alpha = 0.01;
    std::string pc_test = "zf";
    int pc_max_cond = -1;
    std::string pc_graph_out;
    std::string pc_truth;
    pcr->add_option("--data", pc_data, "Dataset CSV (header row, one column per variable)")->required();
    pcr->add_option("--alpha", pc_alpha, "Significance level in [1e-5, 1e-1]");
    pcr->add_option("--test", pc_test, "Independence test: zf, t, mi or mi-sh");
    pcr->add_option("--max-cond", pc_max_cond, "Cap on conditioning-set size (negative: none)");
    pcr->add_option("--graph-out", pc_graph_out, "Write the learned CPDAG in edge-list form");
    pcr->add_option("--truth", pc_truth, "True graph in edge-list form; adds SHD to the output");

    auto* tune = app.add_subcommand("tune", "Run a tuning experiment over the scenario grid");
    std::vector<std::string> tune_methods;
    std::string tune_config;
    bool tune_desk = false;
    bool tune_full = false;
    std::optional<std::string> tune_out;
    std::optional<int> tune_replicas, tune_budget, tune_threads;
    std::optional<std::uint64_t> tune_seed;
    tune->add_option("--method", tune_methods, "bo, rs or ec; repeatable (default: all)");
    tune->add_option("--config", tune_config, "key = value configuration file");
    auto* desk = tune->add_flag("--desk-scale", tune_desk, "8 scenarios, 10 replicas, budget 30");
    tune->add_flag("--full-scale", tune_full, "32 scenarios, 40 replicas, budget 30")->excludes(desk);
    tune->add_option("--out", tune_out, "Output directory");
    tune->add_option("--replicas", tune_replicas, "Override the replica count");
    tune->add_option("--budget", tune_budget, "Override the evaluation budget");
    tune->add_option("--seed", tune_seed, "Override base_seed");
    tune->add_option("--threads", tune_threads, "Worker threads (0: hardware concurrency)");

    auto* rep = app.add_subcommand("report", "Summarize a results directory into CSV tables");
    std::string rep_in;
    rep->add_option("--in", rep_in, "Results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*sim) {
            pcbo::ScenarioSpec spec{sim_p, sim_n, sim_N};
            spec.validate();
            const pcbo::RngStream root(sim_seed);
            pcbo::RngStream dag_rng = root.child({pcbo::tag(pcbo::StreamPurpose::Dag)});
            pcbo::RngStream w_rng = root.child({pcbo::tag(pcbo::StreamPurpose::Weights)});
            pcbo::RngStream d_rng = root.child({pcbo::tag(pcbo::StreamPurpose::Data)});
            const pcbo::Dag dag = pcbo::sample_dag(sim_p, sim_n, dag_rng);
            const pcbo::Gbn gbn = pcbo::sample_weights(dag, w_rng);
            const pcbo::Dataset data = pcbo::sample_data(gbn, sim_N, d_rng);
            {
                auto out = open_out(sim_prefix + ".gbn");
                pcbo::write_gbn(gbn, out);
            }
            {
                auto out = open_out(sim_prefix + ".csv");
                pcbo::write_dataset_csv(data, out);
            }
            {
                auto out = open_out(sim_prefix + ".cpdag");
                out << pcbo::format_graph(pcbo::dag_to_cpdag(dag).graph());
            }
            json j;
            j["scenario"] = spec.id();
            j["edges"] = dag.num_edges();
            j["files"] = {sim_prefix + ".gbn", sim_prefix + ".csv", sim_prefix + ".cpdag"};
            std::cout << j.dump() << '\n';
        } else if (*pcr) {
            std::ifstream in(pc_data);
            if (!in) throw pcbo::InvalidInput("cannot open " + pc_data);
            const pcbo::Dataset data = pcbo::read_dataset_csv(in);
            const pcbo::Theta theta = pcbo::Theta::from_alpha(pc_alpha, pcbo::parse_test_kind(pc_test));
            pcbo::PcOptions options;
            if (pc_max_cond >= 0) options.max_cond = pc_max_cond;
            const pcbo::PcResult result = pcbo::pc_stable_detailed(data, theta, options);
            json j = json::parse(pcbo::pc_result_json(result, theta, pc_data));
            if (!pc_truth.empty()) {
                std::ifstream tin(pc_truth);
                if (!tin) throw pcbo::InvalidInput("cannot open " + pc_truth);
                const pcbo::Pdag truth = pcbo::parse_graph(tin);
                if (truth.size() != data.p()) throw pcbo::InvalidInput("truth graph size differs from the dataset");
                const pcbo::Cpdag t(truth);
                j["shd"] = pcbo::shd(result.cpdag, t);
                j["normalized_shd"] = pcbo::normalized_shd(result.cpdag, t);
            }
            if (!pc_graph_out.empty()) {
                auto out = open_out(pc_graph_out);
                out << pcbo::format_graph(result.cpdag.graph());
            }
            std::cout << j.dump() << '\n';
        } else if (*tune) {
            pcbo::ExperimentConfig config =
                tune_full ? pcbo::ExperimentConfig::full_scale() : pcbo::ExperimentConfig::desk_scale();
            if (!tune_config.empty()) config = pcbo::load_config(tune_config, config);
            if (!tune_methods.empty()) {
                config.methods.clear();
                for (const auto& m : tune_methods) config.methods.push_back(pcbo::parse_method(m));
            }
            if (tune_out) config.output_dir = *tune_out;
            if (tune_replicas) config.replicas = *tune_replicas;
            if (tune_budget) config.budget = *tune_budget;
            if (tune_seed) config.base_seed = *tune_seed;
            if (tune_threads) config.threads = *tune_threads;
            const pcbo::RunSummary s = pcbo::run_experiment(config);
            json j;
            j["output_dir"] = s.output_dir.string();
            j["units_run"] = s.units_run;
            j["units_skipped"] = s.units_skipped;
            j["objective_evaluations"] = s.objective_evaluations;
            j["failures"] = s.failures;
            std::cout << j.dump() << '\n';
            if (!s.failures.empty()) return fail("partial_failure", std::to_string(s.failures.size()) + " unit(s) failed", 3);
        } else if (*rep) {
            const pcbo::ReportSummary s = pcbo::report(rep_in);
            json j;
            j["global_best"] = s.global_best;
            for (const auto& [m, r] : s.methods) {
                json mj;
                mj["replicas"] = r.replicas;
                mj["mode_test"] = std::string(pcbo::to_string(r.mode_test));
                mj["alpha_mass_below_0.025"] = r.alpha_mass_below_0025;
                j["methods"][std::string(pcbo::to_string(m))] = mj;
            }
            std::cout << j.dump() << '\n';
        }
    } catch (const pcbo::InvalidInput& e) {
        return fail("invalid_input", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}
